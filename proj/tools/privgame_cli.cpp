#include <iostream>

#include "privgame/experiments.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return privgame::cli_main(args, std::cout, std::cerr);
}
