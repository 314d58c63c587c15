#include <iostream>

#include "cscope/app/cli.hpp"

int main(int argc, char** argv) { return cscope::run_cli(argc, argv, std::cout, std::cerr); }
