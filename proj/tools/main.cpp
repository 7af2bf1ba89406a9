#include <iostream>

#include "spamnb_cli.hpp"

int main(int argc, char** argv) { return spamnb::cli::run(argc, argv, std::cout, std::cerr); }
