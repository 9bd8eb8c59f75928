#include <iostream>

#include "latgf/acceptance.hpp"

int main(int argc, char** argv) {
  latgf::AcceptanceOptions opt;
  opt.cli_path = LATGF_CLI_PATH;
  for (int i = 1; i < argc; ++i) opt.only.insert(std::atoi(argv[i]));
  int failed = 0;
  latgf::run_acceptance(opt, [&](const latgf::CriterionResult& r) {
    std::cout << latgf::format_result(r) << std::endl;
    if (!r.pass) ++failed;
  });
  std::cout << (failed ? std::to_string(failed) + " criteria FAILED" : std::string("all criteria PASS")) << "\n";
  return failed ? 1 : 0;
}
