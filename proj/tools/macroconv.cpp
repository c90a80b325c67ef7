#include <iostream>

#include "macroconv/cli.hpp"

int main(int argc, char** argv) { return macroconv::cli::run(argc, argv, std::cout, std::cerr); }
