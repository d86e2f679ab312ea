#include <iostream>

#include "repdays/cli.hpp"

int main(int argc, char** argv) { return repdays::cli::run_cli(argc, argv, std::cout, std::cerr); }
