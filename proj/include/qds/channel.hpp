#pragma once

#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include "qds/linalg.hpp"

namespace qds {

namespace tol {
inline constexpr double kInv = 1e-10;
// Trace-preservation tolerance is scale-aware: kTpPerDim * d.
inline constexpr double kTpPerDim = 1e-9;
}  // namespace tol

// A CP map given by an ordered list of square Kraus operators of equal size.
class KrausMap {
 public:
  // Throws DimensionError for an empty, non-square or ragged list.
  explicit KrausMap(std::vector<CMatrix> kraus);

  Index dim() const { return dim_; }
  std::size_t size() const { return kraus_.size(); }
  const std::vector<CMatrix>& operators() const { return kraus_; }
  const CMatrix& operator[](std::size_t k) const { return kraus_[k]; }

  // max_k ||M_k||_F, the reference scale for block-norm tolerances.
  double scale() const;

 private:
  Index dim_ = 0;
  std::vector<CMatrix> kraus_;
};

// Hermitian, PSD, unit-trace matrix.
class DensityOperator {
 public:
  explicit DensityOperator(CMatrix rho);
  static DensityOperator maximally_mixed(Index d);

  Index dim() const { return rho_.rows(); }
  const CMatrix& matrix() const { return rho_; }

 private:
  CMatrix rho_;
};

struct ValidationReport {
  bool is_tp = false;
  double tp_residual = 0.0;
  bool dims_ok = false;
  Index dim = 0;
  std::size_t kraus_count = 0;
};

// Throws DimensionError for ragged lists; otherwise reports ||sum M^dag M - I||_F.
ValidationReport validate(std::span<const CMatrix> kraus);
ValidationReport validate(const KrausMap& map);

CMatrix apply(const KrausMap& map, const CMatrix& x);
CMatrix apply_dual(const KrausMap& map, const CMatrix& x);

// Eigen expressions pull namespace std into argument-dependent lookup, where
// std::apply would otherwise be the better match.
template <typename X>
  requires std::is_base_of_v<Eigen::EigenBase<std::decay_t<X>>, std::decay_t<X>>
CMatrix apply(const KrausMap& map, X&& x) {
  if constexpr (std::is_same_v<std::decay_t<X>, CMatrix>) {
    const CMatrix& ref = x;
    return apply(map, ref);
  } else {
    const CMatrix tmp(std::forward<X>(x));
    return apply(map, tmp);
  }
}

// Linear map between operator spaces acting on column-stacked vectors:
// vec(T(X)) = matrix * vec(X). For a Kraus list this is sum_k conj(M_k) (x) M_k.
struct Superoperator {
  Index dim_in = 0;   // input operators are dim_in x dim_in
  Index dim_out = 0;  // output operators are dim_out x dim_out
  CMatrix matrix;     // dim_out^2 x dim_in^2

  CMatrix operator()(const CMatrix& x) const;
  // Hilbert-Schmidt adjoint, i.e. the dual map.
  Superoperator adjoint() const;
};

Superoperator superoperator(const KrausMap& map);
// sum_k conj(A_k) (x) A_k for rectangular blocks A_k : C^in -> C^out.
Superoperator superoperator_from_blocks(const std::vector<CMatrix>& blocks, Index dim_in,
                                        Index dim_out);

// Kraus operators rotated into [basis(H_S) | basis(H_S^perp)] and split into
// S (m x m), P (m x r), Q (r x m) and R (r x r) blocks.
struct KrausBlocks {
  CMatrix s, p, q, r;
};

struct BlockDecomposedMap {
  SubspaceBasis s_space;
  SubspaceBasis r_space;
  std::vector<KrausBlocks> blocks;

  // [basis(H_S) | basis(H_R)], a d x d unitary.
  CMatrix combined_basis() const;
  // Reassembled V^dag M_k V.
  CMatrix rotated(std::size_t k) const;
};

BlockDecomposedMap block_decompose(const KrausMap& map, const SubspaceBasis& h_s);

// T_S on S-operators, T_R on R-operators and T_SR : R-operators -> S-operators,
// each in the coordinates of the rotated bases.
struct ReducedMaps {
  SubspaceBasis s_space;
  SubspaceBasis r_space;
  Superoperator t_s;
  Superoperator t_r;
  Superoperator t_sr;
};

// Also checks T_SR(A_R) = Pi_S T(A_R) Pi_S on every R-operator basis element and
// throws InternalInconsistencyError on disagreement.
ReducedMaps reduced_maps(const KrausMap& map, const SubspaceBasis& h_s);

SubspaceBasis support_of_state_set(std::span<const CMatrix> states, TolPolicy policy = {});

struct InvarianceReport {
  bool invariant = false;
  double residual = 0.0;      // max_k ||M_{k,Q}||_F
  double support_leak = 0.0;  // sqrt(Tr(Pi_R T(Pi_S) Pi_R)), computed through apply()
  double threshold = 0.0;
};

// Decides invariance on the Q-blocks and cross-checks the support of T(Pi_S).
InvarianceReport check_invariance(const KrausMap& map, const SubspaceBasis& h_s);
inline bool is_invariant(const KrausMap& map, const SubspaceBasis& h_s) {
  return check_invariance(map, h_s).invariant;
}

// T^*(Pi_S) >= Pi_S. Requires a TP map.
bool is_subharmonic(const KrausMap& map, const SubspaceBasis& h_s);

// supp(T^{*n}(Pi_S)) for n = 0, 1, ... until two consecutive entries coincide
// or `max_steps` applications were made. Throws NotInvariantError for a
// non-invariant H_S.
std::vector<SubspaceBasis> dual_support_sequence(const KrausMap& map, const SubspaceBasis& h_s,
                                                 int max_steps);

}  // namespace qds
