#include <iostream>
#include <string>
#include <vector>

#include "diffusion_factor/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return diffusion_factor::cli::run(args, std::cout, std::cerr);
}
