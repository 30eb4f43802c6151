#include <iostream>

#include "rou/cli.hpp"

int main(int argc, char** argv) { return rou::cli::run(argc, argv, std::cout, std::cerr); }
