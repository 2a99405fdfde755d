#include "qfn/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return qfn::cli::main_entry(argc, argv, std::cout, std::cerr); }
