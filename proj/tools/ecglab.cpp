#include <iostream>

#include "ecglab/cli.hpp"

int main(int argc, char** argv) { return ecglab::cli::main(argc, argv, std::cout, std::cerr); }
