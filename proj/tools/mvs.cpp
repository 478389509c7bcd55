#include <iostream>

#include "mvs/cli.hpp"

int main(int argc, char** argv) { return mvs::cli::run(argc, argv, std::cout, std::cerr); }
