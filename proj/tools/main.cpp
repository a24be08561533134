#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  const auto parsed = steklov::cli::parse_args(argc, argv);
  if (!parsed.invocation) {
    (parsed.exit_code == 0 ? std::cout : std::cerr) << parsed.message;
    return parsed.exit_code;
  }
  return steklov::cli::execute(*parsed.invocation, std::cout, std::cerr);
}
