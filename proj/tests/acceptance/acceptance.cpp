#include <cstdio>
#include <cstring>
#include <string>

#include "koiter_fsi/checks.hpp"

using namespace kfsi;

int main(int argc, char** argv) {
  CheckOptions opt;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::strcmp(argv[i], "--fault") == 0) opt.fault = argv[i + 1];

  int failed = 0;
  for (const std::string& suite : acceptance_suites()) {
    const CheckResult r = run_check(suite, opt);
    std::printf("criterion %2d %-17s %s  value=%.4g limit=%.3g  %s\n", r.criterion, suite.c_str(),
                r.pass ? "PASS" : "FAIL", r.value, r.limit, r.detail.c_str());
    std::fflush(stdout);
    if (!r.pass) ++failed;
  }
  std::printf("%d of 12 criteria passed\n", 12 - failed);
  return failed ? 1 : 0;
}
