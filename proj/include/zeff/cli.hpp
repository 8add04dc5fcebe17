#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "zeff/types.hpp"

namespace zeff::cli {

struct RunConfig {
  std::string command;  // dtn | effcond | lattice | zsolve | verify
  std::string input_path;
  std::string format = "text";  // text | json
  Tolerances tol{};
  std::uint64_t seed = 2026;

  std::string method = "both";  // dtn: schur | zproblem | both
  std::string pair;             // effcond: "p,q" by node name
  std::string e0_literal;       // zsolve: comma-separated U coordinates
  std::string suite = "all";    // verify
};

/// Exit codes: 0 success, 1 computation or hypothesis error, 2 parse/usage.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace zeff::cli
