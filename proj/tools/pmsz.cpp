#include <iostream>

#include "pmsz/cli.hpp"

int main(int argc, char** argv) {
  return pmsz::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
