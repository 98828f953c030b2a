#include "parkmesh/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return parkmesh::cli::run(argc, argv, std::cout, std::cerr);
}
