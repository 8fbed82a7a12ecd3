#include <iostream>

#include "sncf/cli/cli.hpp"

int main(int argc, char** argv) { return sncf::cli::run(argc, argv, std::cout, std::cerr); }
