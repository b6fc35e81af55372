#include <iostream>

#include "puma/cli.hpp"

int main(int argc, char** argv) { return puma::run_cli(argc, argv, std::cout, std::cerr); }
