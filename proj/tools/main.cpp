#include <iostream>

#include "viral/cli.hpp"

int main(int argc, char** argv) { return viral::run_cli(argc, argv, std::cout, std::cerr); }
