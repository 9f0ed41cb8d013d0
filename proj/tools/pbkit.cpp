#include <iostream>

#include "pbkit/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  auto res = pbkit::run_cli(std::move(args));
  if (!res.out.empty()) std::cout << res.out << "\n";
  if (!res.err.empty()) std::cerr << res.err;
  return res.exit_code;
}
