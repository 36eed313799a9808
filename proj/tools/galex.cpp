#include <iostream>

#include "galex/cli.hpp"

int main(int argc, char** argv) { return galex::run_cli(argc, argv, std::cout, std::cerr); }
