#include <iostream>
#include <string>
#include <vector>

#include "pram/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pram::run_cli(args, std::cout, std::cerr);
}
