// SPDX-License-Identifier: Apache-2.0
#include <compagent_cli/cli.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    return compagent::cli::run_cli({ argv + 1, argv + argc }, std::cout, std::cerr);
}
