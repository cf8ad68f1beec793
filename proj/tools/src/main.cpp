#include "gwr/cli/commands.hpp"

#include <iostream>

int main(int argc, char** argv) { return gwr::cli::run(argc, argv, std::cout, std::cerr); }
