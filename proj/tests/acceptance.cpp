// Full-scale acceptance run: one line per criterion, exit status 1 if any
// criterion fails. Optional arguments: --seed N, --threads N, criterion ids.

#include <cstdlib>
#include <iostream>
#include <string>

#include "femto/validation.hpp"

int main(int argc, char** argv) {
  femto::ValidationOptions opt;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--seed" && i + 1 < argc) {
      opt.seed = std::strtoull(argv[++i], nullptr, 10);
    } else if (a == "--threads" && i + 1 < argc) {
      opt.threads = static_cast<unsigned>(std::strtoul(argv[++i], nullptr, 10));
    } else {
      opt.only.push_back(std::atoi(a.c_str()));
    }
  }
  int failed = 0;
  femto::run_acceptance(opt, [&](const femto::CriterionResult& r) {
    std::cout << femto::format_result(r) << std::endl;
    failed += !r.passed;
  });
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << '\n';
  return failed ? 1 : 0;
}
