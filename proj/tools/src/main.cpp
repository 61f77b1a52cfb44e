#include <iostream>

#include "dphase_cli/commands.hpp"

int main(int argc, char** argv) { return dphase::cli::run(argc, argv, std::cout, std::cerr); }
