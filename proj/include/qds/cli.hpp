#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qds::cli {

enum ExitCode : int {
  kPositive = 0,
  kNegative = 1,  // negative verdict or unmet precondition
  kInputError = 2,
  kInternalError = 3,
};

// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "1", "1−γ₃", ... when sigma matches exactly one such value within 1e-9;
// empty otherwise. gammas[0] is named with subscript `first_index`.
std::string symbolic_radius(double sigma, const std::vector<double>& gammas, std::size_t first_index = 1);

}  // namespace qds::cli
