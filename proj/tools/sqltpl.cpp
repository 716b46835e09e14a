#include <iostream>

#include "sqltpl/cli.hpp"

int main(int argc, char** argv) { return sqltpl::run_cli(argc, argv, std::cout, std::cerr); }
