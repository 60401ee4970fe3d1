#include <iostream>

#include "exai/cli.hpp"

int main(int argc, char** argv) { return exai::cli::run_cli(argc, argv, std::cout, std::cerr); }
