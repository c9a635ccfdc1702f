#include <iostream>
#include <string>
#include <vector>

#include "semlab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return semlab::dispatch(args, std::cout, std::cerr);
}
