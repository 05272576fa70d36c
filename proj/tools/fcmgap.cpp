#include <iostream>

#include "fcmgap/cli.hpp"

int main(int argc, char** argv) { return fcmgap::cli::run_cli(argc, argv, std::cout, std::cerr); }
