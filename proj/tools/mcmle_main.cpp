#include <iostream>
#include <string>
#include <vector>

#include "mcmle/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mcmle::cli::run_cli(args, std::cout, std::cerr);
}
