// SPDX-License-Identifier: MIT
#include "rfflab/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return rfflab::run_cli(argc, argv, std::cout, std::cerr);
}
