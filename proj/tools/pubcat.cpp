#include <iostream>

#include "pubcat/gateway/cli.hpp"

int main(int argc, char** argv) { return pubcat::run_cli(argc, argv, std::cout, std::cerr); }
