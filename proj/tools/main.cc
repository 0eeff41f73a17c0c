#include <iostream>

#include "cli.h"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  return fpshield::cli::run(argc, argv, std::cin, std::cout, std::cerr);
}
