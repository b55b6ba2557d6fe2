#include <iostream>
#include <string>
#include <vector>

#include "navscore/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return navscore::cli::run(args, std::cout, std::cerr);
}
