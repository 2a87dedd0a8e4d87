#include <iostream>
#include <string>
#include <vector>

#include "gtsp/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gtsp::run(args, std::cout, std::cerr);
}
