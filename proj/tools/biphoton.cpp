#include <iostream>

#include "biphoton/cli.hpp"

int main(int argc, char** argv) {
    return biphoton::run_cli(argc, argv, std::cout, std::cerr);
}
