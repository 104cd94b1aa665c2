#include <string>
#include <vector>

#include "bayesrl/harness.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return bayesrl::run_cli(args);
}
