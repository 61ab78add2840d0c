#include <iostream>
#include <string>
#include <vector>

#include "ragrules/cli.hpp"

int main(int argc, char** argv) {
  return ragrules::run_cli(std::vector<std::string>(argv, argv + argc),
                           std::cout, std::cerr);
}
