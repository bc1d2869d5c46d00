#include "bsvem/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return bsvem::cli::run(argc, argv, std::cout, std::cerr); }
