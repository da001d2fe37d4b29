#include <iostream>

#include "txmotif/cli.hpp"

int main(int argc, char** argv) {
  return txmotif::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
