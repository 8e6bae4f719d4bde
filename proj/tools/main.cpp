#include "msynth/cli/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return msynth::runCli(std::move(args), std::cout, std::cerr);
}
