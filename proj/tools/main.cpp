#include <string>
#include <vector>

#include "fracp/runner.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return fracp::cli::dispatch(args);
}
