#include <iostream>

#include "knotrace/cli.hpp"

int main(int argc, char** argv) { return knotrace::run_cli(argc, argv, std::cout, std::cerr); }
