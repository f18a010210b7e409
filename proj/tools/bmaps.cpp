// Command-line front end. Subcommands are registered as the corresponding
// library modules land; `bmaps --help` lists what is available.
#include <cstdio>
#include <exception>

#include "CLI11.hpp"

int main(int argc, char** argv) {
  CLI::App app{"random quadrangulation sampling, metric and verification toolkit"};
  app.require_subcommand(0, 1);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
