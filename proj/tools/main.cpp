#include <iostream>
#include <string>
#include <vector>

#include "vesseltop/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv, argv + argc);
    return vesseltop::run_cli(args, std::cout, std::cerr);
}
