#include <iostream>

#include "trapcool/cli.hpp"

int main(int argc, char** argv) {
  return trapcool::cli::run(argc, argv, std::cout, std::cerr);
}
