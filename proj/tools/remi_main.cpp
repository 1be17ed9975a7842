#include <iostream>

#include "remi/cli.hpp"

int main(int argc, char** argv) { return remi::cli::run(argc, argv, std::cout, std::cerr); }
