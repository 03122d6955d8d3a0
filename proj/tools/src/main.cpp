#include <iostream>

#include "qds/cli/cli.hpp"

int main(int argc, char** argv) { return qds::cli::run_cli(argc, argv, std::cout, std::cerr); }
