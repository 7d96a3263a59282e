#include <iostream>

#include "ineq_cli/cli.hpp"

int main(int argc, char** argv) { return ineq::cli::dispatch(argc, argv, std::cout, std::cerr); }
