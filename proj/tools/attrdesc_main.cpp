#include <iostream>

#include "attrdesc/cli/commands.hpp"

int main(int argc, char** argv) {
  return attrdesc::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
