#include <iostream>
#include <string>
#include <vector>

#include "featfirst/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return featfirst::cli::run(args, std::cout, std::cerr);
}
