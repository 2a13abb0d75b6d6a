#include <iostream>

#include "pcbayes/cli.hpp"

int main(int argc, char** argv) {
  return pcbayes::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
