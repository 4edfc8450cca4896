#include "lexlink/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return lexlink::run_cli(argc, argv, std::cout, std::cerr); }
