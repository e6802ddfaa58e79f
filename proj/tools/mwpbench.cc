#include <iostream>

#include "mwp/cli.h"

int main(int argc, char** argv) { return mwp::run_cli(argc, argv, std::cout, std::cerr); }
