#include <iostream>

#include "novikit/cli.hpp"

int main(int argc, char** argv) {
  return novikit::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
