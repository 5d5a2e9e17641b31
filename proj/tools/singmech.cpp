#include <iostream>

#include "singmech/cli.hpp"

int main(int argc, char** argv) { return singmech::cli::run(argc, argv, std::cout, std::cerr); }
