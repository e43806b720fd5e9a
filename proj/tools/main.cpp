#include "causal_cues/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return causal_cues::run_cli(argc, argv, std::cout, std::cerr); }
