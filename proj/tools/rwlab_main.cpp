#include <iostream>

#include "rwlab/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return rwlab::run_cli(args, std::cout, std::cerr);
}
