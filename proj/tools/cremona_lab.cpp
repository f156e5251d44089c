#include <iostream>

#include "cremona/cli.hpp"

int main(int argc, char** argv) { return cremona::run_cli(argc, argv, std::cout, std::cerr); }
