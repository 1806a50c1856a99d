#include <iostream>

#include "pvsim/cli.hpp"

int main(int argc, char** argv) {
    return pvsim::cli::run(argc, argv, std::cout, std::cerr);
}
