#include <iostream>

#include "marimba/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return marimba::run_cli(args, std::cout, std::cerr);
}
