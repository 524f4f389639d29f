#include <iostream>

#include <gqem/cli/commands.hpp>

int main(int argc, char** argv) { return gqem::cli::run(argc, argv, std::cout, std::cerr); }
