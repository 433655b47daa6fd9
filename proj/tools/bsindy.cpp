#include <iostream>
#include <string>
#include <vector>

#include "bsindy/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return bsindy::run(args, std::cout, std::cerr);
}
