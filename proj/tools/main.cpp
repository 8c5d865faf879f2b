#include <string>
#include <vector>

#include "cli/commands.hpp"

int main(int argc, char** argv) {
  return sgdcli::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
