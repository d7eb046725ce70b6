#include <iostream>

#include "riskpref/interface.hpp"

int main(int argc, char** argv) { return riskpref::interface::cli_run(argc, argv, std::cout, std::cerr); }
