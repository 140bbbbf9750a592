#pragma once

#include <cstdint>
#include <vector>

#include "qds/channel.hpp"
#include "qds/linalg.hpp"

namespace qds {

namespace tol {
// sigma < 1 - kSpec decides GAS; consecutive radii must differ by more than this.
inline constexpr double kSpec = 1e-9;
}  // namespace tol

struct PeripheralOptions {
  int restarts = 16;  // Cesaro seed + (restarts - 1) random Hermitian seeds
  int cesaro_terms = 256;
  int dykstra_max_iter = 5000;
  double dykstra_step_tol = 1e-12;
  // Relative eigenvalue threshold when reading off the support of accepted
  // PSD elements.
  double support_rel_tol = 1e-8;
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
};

struct PeripheralFace {
  double sigma = 0.0;
  SubspaceBasis support;  // in the coordinates of the reduced space
  Index eigenspace_dim = 0;
  int accepted_elements = 0;
};

// Spectral radius of a reduced CP map and the support of the PSD elements of
// its generalized eigenspace at that radius. Throws NumericalDegeneracyError
// when no real eigenvalue sits at the radius or no PSD element is found.
PeripheralFace peripheral_face_support(const Superoperator& t_r, const PeripheralOptions& opts = {});

struct NfdStage {
  SubspaceBasis transient;
  double sigma = 0.0;
};

struct NfdResult {
  SubspaceBasis target;
  std::vector<NfdStage> stages;
  // H_S = chain[0] c chain[1] c ... c chain.back() = C^d
  std::vector<SubspaceBasis> chain;
  bool is_gas = false;
  SubspaceBasis minimal_gas;
};

struct NfdOptions {
  double spectral_tol = tol::kSpec;
  PeripheralOptions peripheral;
};

// Nested-face decomposition starting from an invariant subspace. Throws
// NotInvariantError when H_S is not invariant and InternalInconsistencyError
// when the produced radii fail to decrease strictly.
NfdResult nfd(const KrausMap& map, const SubspaceBasis& h_s, const NfdOptions& opts = {});

}  // namespace qds
