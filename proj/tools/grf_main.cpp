#include <iostream>

#include "grf/cli.hpp"

int main(int argc, char** argv) { return grf::run_cli(argc, argv, std::cout, std::cerr); }
