#include <iostream>

#include "nestasp/cli.hpp"

int main(int argc, char** argv) { return nestasp::cli::main(argc, argv, std::cout, std::cerr); }
