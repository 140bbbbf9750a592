#pragma once

#include <string>
#include <vector>

#include "qds/channel.hpp"
#include "qds/linalg.hpp"

namespace qds {

struct AsymptoticOptions {
  // Skip the DID-based GAS check when the caller already verified it.
  bool gas_verified = false;
};

// Limit probabilities lim Tr(Pi_{S_i} T^n(rho)) for mutually orthogonal
// invariant parts whose sum is GAS. Throws NotGasError / NotInvariantError /
// PreconditionError when the preconditions fail.
std::vector<double> asymptotic_probability(const KrausMap& map, const std::vector<SubspaceBasis>& parts,
                                           const DensityOperator& rho,
                                           const AsymptoticOptions& opts = {});

// lim T^{*n}(Pi_{S_i}) for each part.
std::vector<CMatrix> limit_dual_projection(const KrausMap& map, const std::vector<SubspaceBasis>& parts,
                                           const AsymptoticOptions& opts = {});

// T^n(rho) by repeated application; throws PreconditionError when the trace
// drifts by more than 1e-9 (i.e. the map is not TP).
DensityOperator iterate_oracle(const KrausMap& map, const DensityOperator& rho, int n_steps);

// T^*(Pi_{S_i}) = Pi_{S_i} + T_SR^*(Pi_{S_i}) for every part, blockwise within
// 1e-10. Parts must be mutually orthogonal.
bool dual_step_identity_check(const KrausMap& map, const std::vector<SubspaceBasis>& parts);

struct AsymptoticReport {
  std::vector<SubspaceBasis> targets;
  std::vector<CMatrix> limit_duals;
  std::vector<double> raw_probabilities;
  std::vector<double> probabilities;  // clamped to [0, 1]
  // 1 - sum of raw probabilities: mass not accounted for by the parts.
  double remainder = 0.0;
  std::vector<std::string> warnings;
};

AsymptoticReport asymptotic_report(const KrausMap& map, const std::vector<SubspaceBasis>& parts,
                                   const DensityOperator& rho, const AsymptoticOptions& opts = {});

}  // namespace qds
