#include <iostream>

#include "levy_replenish/cli.hpp"

int main(int argc, char** argv) { return levy_replenish::run_cli(argc, argv, std::cout, std::cerr); }
