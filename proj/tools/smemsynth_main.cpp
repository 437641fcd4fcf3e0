#include <iostream>

#include "smemsynth/cli.hpp"

int main(int argc, char** argv) { return smemsynth::run_cli(argc, argv, std::cout, std::cerr); }
