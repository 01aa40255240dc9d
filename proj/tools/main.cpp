#include <iostream>
#include <string>
#include <vector>

#include "strahler/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return strahler::run_cli(args, std::cout, std::cerr);
}
