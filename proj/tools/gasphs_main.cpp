#include <iostream>

#include "gasphs/cli.hpp"

int main(int argc, char** argv) { return gasphs::run_cli(argc, argv, std::cout, std::cerr); }
