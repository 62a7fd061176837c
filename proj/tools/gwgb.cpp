#include <iostream>

#include "gwgb/cli.hpp"

int main(int argc, char** argv) { return gwgb::cli::run(argc, argv, std::cout, std::cerr); }
