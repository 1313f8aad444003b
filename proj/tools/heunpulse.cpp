#include <iostream>

#include "heunpulse/cli.hpp"

int main(int argc, char** argv) { return heunpulse::cli::run(argc, argv, std::cout, std::cerr); }
