#include "cli/cli.hpp"

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::map<std::string, std::string> env;
  if (const char* threads = std::getenv("TDACLOUD_THREADS")) env["TDACLOUD_THREADS"] = threads;
  return tdacloud::cli::run(args, std::cout, std::cerr, env);
}
