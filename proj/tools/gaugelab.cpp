#include <iostream>

#include "gaugelab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gaugelab::cli::run_cli(args, std::cout, std::cerr);
}
