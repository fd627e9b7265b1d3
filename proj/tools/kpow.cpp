#include <iostream>

#include "kpow/cli.hpp"

int main(int argc, char** argv) {
    return kpow::cli::run(argc, argv, std::cout, std::cerr);
}
