#include <iostream>

#include "tvflow/cli.hpp"

int main(int argc, char** argv) { return tvflow::run_cli(argc, argv, std::cout, std::cerr); }
