#include <iostream>

#include "datamarket/cli.hpp"

int main(int argc, char** argv) {
  return datamarket::run_cli(argc, argv, std::cout, std::cerr);
}
