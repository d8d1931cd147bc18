#include <iostream>

#include "lr1/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return lr1::run_cli(args, std::cout, std::cerr);
}
