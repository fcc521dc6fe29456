#include <iostream>

#include "gencert/cli.hpp"

int main(int argc, char** argv) {
  return gencert::cli::main_entry(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
