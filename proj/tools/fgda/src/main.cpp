#include <iostream>

#include "fgda_cli/cli.hpp"

int main(int argc, char** argv) { return fgda::cli::run(argc, argv, std::cout, std::cerr); }
