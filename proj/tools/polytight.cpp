#include "polytight/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return polytight::run_cli(argc, argv, std::cout, std::cerr);
}
