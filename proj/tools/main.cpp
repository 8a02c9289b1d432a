#include <iostream>

#include "mmdscan/cli.hpp"

int main(int argc, char** argv) { return mmdscan::cli::run(argc, argv, std::cout, std::cerr); }
