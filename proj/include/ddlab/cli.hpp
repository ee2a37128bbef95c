#pragma once

// Batch front-end. Exit codes: 0 success, 1 claim or check failure,
// 2 usage or configuration error.

#include <iosfwd>
#include <string>
#include <vector>

namespace ddlab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Timeline bookkeeping checks reported by `verify`.
std::vector<CheckResult> bookkeeping_checks();

}  // namespace ddlab
