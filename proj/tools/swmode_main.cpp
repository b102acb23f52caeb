#include <string>
#include <vector>

#include "swmode/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return swmode::run_cli(args);
}
