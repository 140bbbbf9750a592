#pragma once

#include <vector>

#include "qds/channel.hpp"
#include "qds/linalg.hpp"

namespace qds {

enum class DidOutcome { kSuccessful, kUnsuccessful };

struct DidStage {
  SubspaceBasis transient;
  // Eigen-extrema of sum_k M_{k,P_i}^dag M_{k,P_i}, where M_{k,P_i} maps this
  // stage into the previous one (H_S for the first stage).
  double gamma_min = 0.0;
  double gamma_max = 0.0;
};

struct DidResult {
  SubspaceBasis target;
  std::vector<DidStage> stages;
  DidOutcome outcome = DidOutcome::kSuccessful;
  SubspaceBasis trapped;  // H_{T_N} when unsuccessful, zero subspace otherwise

  // Unitary [basis(H_S) | basis(H_T1) | ... | basis(H_TN)] and the Kraus
  // operators expressed in it.
  CMatrix did_basis;
  std::vector<CMatrix> block_form;
  // Block boundaries: block j spans columns offsets[j] .. offsets[j+1]-1.
  std::vector<Index> offsets;

  bool successful() const { return outcome == DidOutcome::kSuccessful; }
  // Block (row block a, column block b) of the k-th rotated Kraus operator.
  CMatrix block(std::size_t k, std::size_t a, std::size_t b) const;
};

// Dissipation-induced decomposition. Throws NotInvariantError for a
// non-invariant H_S and InternalInconsistencyError when the produced block
// form breaks its zero pattern.
DidResult did(const KrausMap& map, const SubspaceBasis& h_s);

bool is_gas_did(const KrausMap& map, const SubspaceBasis& h_s);

// GAS iff supp(T^{*n}(Pi_S)) strictly grows until it is the whole space.
bool is_gas_dual(const KrausMap& map, const SubspaceBasis& h_s);

// Checks supp(T^{*n}(Pi_S)) = H_S + H_T1 + ... + H_Tn for n <= N. Requires a
// successful DID (PreconditionError otherwise).
bool did_dual_consistency(const KrausMap& map, const SubspaceBasis& h_s);

struct RateBounds {
  double gamma_min = 0.0;
  double gamma_max = 0.0;
};

// Per-stage one-step transition bounds; PreconditionError on an unsuccessful
// decomposition.
std::vector<RateBounds> transition_rates(const DidResult& result);
// Smallest gamma_min over the stages (1 when there are no stages).
double bottleneck_rate(const DidResult& result);

}  // namespace qds
