#include <iostream>
#include <string>
#include <vector>

#include "tbk/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return tbk::run(args, std::cout, std::cerr);
}
