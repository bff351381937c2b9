#include <iostream>
#include <string>
#include <vector>

#include "sideinfo/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sideinfo::cli_dispatch(args, std::cout, std::cerr);
}
