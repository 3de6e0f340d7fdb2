#include <iostream>

#include "f0bench/cli.hpp"

int main(int argc, char** argv) { return f0bench::cli_main(argc, argv, std::cout, std::cerr); }
