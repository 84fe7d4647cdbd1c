#include "slice/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return slice::cli::main(argc, argv, std::cout, std::cerr); }
