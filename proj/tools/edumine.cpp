#include <iostream>

#include "edumine/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return edumine::cli::run(args, std::cout, std::cerr);
}
