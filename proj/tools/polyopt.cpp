#include "polyopt/driver/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return polyopt::cli_run(args, std::cout, std::cerr);
}
