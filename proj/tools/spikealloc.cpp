#include <iostream>

#include "spikealloc/cli.hpp"

int main(int argc, char **argv)
{
    return spikealloc::cli::run(argc, argv, std::cout, std::cerr);
}
