#include <iostream>

#include "chiralvdw/cli.hpp"

int main(int argc, char** argv) { return chiralvdw::run_cli(argc, argv, std::cout, std::cerr); }
