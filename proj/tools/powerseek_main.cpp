#include "powerseek/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return powerseek::run_cli(argc, argv, std::cout, std::cerr); }
