#include "garchcp/app.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return garchcp::app::run_cli(argc, argv, std::cout, std::cerr);
}
