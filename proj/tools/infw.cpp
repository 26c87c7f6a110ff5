#include "infw/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return infw::run_cli(argc, argv, std::cout, std::cerr);
}
