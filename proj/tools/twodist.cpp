#include <iostream>

#include "twodist/cli.hpp"

int main(int argc, char** argv) { return twodist::run(argc, argv, std::cout, std::cerr); }
