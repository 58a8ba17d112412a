#include <iostream>

#include "zermelo/cli/commands.hpp"

int main (int argc, char** argv) { return zermelo::cli::run (argc, argv, std::cout, std::cerr); }
