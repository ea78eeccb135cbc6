#include <iostream>

#include "bloch/cli_runner.hpp"

int main(int argc, char** argv) {
  return bloch::run_cli(argc, argv, std::cout, std::cerr);
}
