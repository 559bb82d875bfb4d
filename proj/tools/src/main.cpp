#include <iostream>

#include "webqa_cli/cli.hpp"

int main(int argc, char** argv) { return webqa::cli::run(argc, argv, std::cout, std::cerr); }
