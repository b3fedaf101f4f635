#include <iostream>

#include "pbox/cli.hpp"

int main(int argc, char** argv) { return pbox::cli::main_entry(argc, argv, std::cout, std::cerr); }
