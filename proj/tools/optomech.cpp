#include <iostream>
#include <string>
#include <vector>

#include "optomech/workbench/commands.hpp"

int main(int argc, char **argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return optomech::workbench::run_cli(args, std::cout, std::cerr);
}
