#include <string>
#include <vector>

#include "papermatch/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return papermatch::run_cli(args);
}
