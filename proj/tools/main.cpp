#include <seqdiag/cli.hpp>

#include <iostream>

int main(int argc, char** argv) {
    return seqdiag::run_cli(argc, argv, std::cout, std::cerr);
}
