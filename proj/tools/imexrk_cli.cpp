#include "imexrk/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return imexrk::run_cli(argc, argv, std::cout, std::cerr); }
