#include <iostream>

#include "fblv/cli.hpp"

int main(int argc, char** argv)
{
    return fblv::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
