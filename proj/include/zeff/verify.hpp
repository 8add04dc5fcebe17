#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zeff/types.hpp"

namespace zeff::verify {

struct CheckResult {
  std::string suite;
  std::string name;
  bool pass = false;
  double residual = 0.0;
  std::string note;
};

struct Options {
  std::uint64_t seed = 2026;
  std::string suite = "all";  // all | counterexamples | numkit | blockop | zproblem |
                              // hodge | network | lattice
  Tolerances tol{};
};

std::vector<CheckResult> run(const Options& options);

inline bool all_passed(const std::vector<CheckResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

}  // namespace zeff::verify
