#include <string>
#include <vector>

#include "usyf/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return usyf::cli::run(args);
}
