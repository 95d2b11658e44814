#include <iostream>
#include <string>
#include <vector>

#include "lila/cli/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return lila::cli::run(args, std::cout, std::cerr);
}
