#include "qds/channel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qds/errors.hpp"

namespace qds {

namespace {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

void check_square_operand(const KrausMap& map, const CMatrix& x, const char* who) {
  if (x.rows() != map.dim() || x.cols() != map.dim()) {
    throw DimensionError(std::string(who) + ": operand is " + std::to_string(x.rows()) + "x" +
                         std::to_string(x.cols()) + ", map acts on " + std::to_string(map.dim()) +
                         "x" + std::to_string(map.dim()));
  }
}

void check_kraus_shapes(std::span<const CMatrix> kraus) {
  if (kraus.empty()) throw DimensionError("Kraus list is empty");
  const Index d = kraus.front().rows();
  for (std::size_t k = 0; k < kraus.size(); ++k) {
    if (kraus[k].rows() != d || kraus[k].cols() != d) {
      throw DimensionError("Kraus operator " + std::to_string(k) + " is " +
                           std::to_string(kraus[k].rows()) + "x" + std::to_string(kraus[k].cols()) +
                           ", expected " + std::to_string(d) + "x" + std::to_string(d));
    }
    if (!kraus[k].allFinite()) {
      throw PreconditionError("Kraus operator " + std::to_string(k) + " has non-finite entries");
    }
  }
}

void check_subspace(const KrausMap& map, const SubspaceBasis& h) {
  if (h.ambient_dim() != map.dim()) {
    throw DimensionError("subspace lives in C^" + std::to_string(h.ambient_dim()) +
                         ", map acts on C^" + std::to_string(map.dim()));
  }
}

}  // namespace

KrausMap::KrausMap(std::vector<CMatrix> kraus) : kraus_(std::move(kraus)) {
  check_kraus_shapes(kraus_);
  dim_ = kraus_.front().rows();
}

double KrausMap::scale() const {
  double s = 0.0;
  for (const auto& m : kraus_) s = std::max(s, m.norm());
  return s;
}

DensityOperator::DensityOperator(CMatrix rho) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols()) throw DimensionError("density operator is not square");
  if (!rho_.allFinite()) throw PreconditionError("density operator has non-finite entries");
  if (hermiticity_defect(rho_) > tol::kHerm * std::max(1.0, rho_.norm())) {
    throw PreconditionError("density operator is not Hermitian");
  }
  rho_ = hermitian_part(rho_);
  if (min_eigenvalue(rho_) < -tol::kRank) throw PreconditionError("density operator is not PSD");
  if (std::abs(rho_.trace() - Complex(1.0)) > 1e-9) {
    throw PreconditionError("density operator trace differs from 1");
  }
}

DensityOperator DensityOperator::maximally_mixed(Index d) {
  return DensityOperator(CMatrix::Identity(d, d) / static_cast<double>(d));
}

ValidationReport validate(std::span<const CMatrix> kraus) {
  check_kraus_shapes(kraus);
  ValidationReport rep;
  rep.dims_ok = true;
  rep.dim = kraus.front().rows();
  rep.kraus_count = kraus.size();
  CMatrix sum = CMatrix::Zero(rep.dim, rep.dim);
  for (const auto& m : kraus) sum += m.adjoint() * m;
  rep.tp_residual = (sum - CMatrix::Identity(rep.dim, rep.dim)).norm();
  rep.is_tp = rep.tp_residual <= tol::kTpPerDim * static_cast<double>(rep.dim);
  return rep;
}

ValidationReport validate(const KrausMap& map) { return validate(std::span(map.operators())); }

CMatrix apply(const KrausMap& map, const CMatrix& x) {
  check_square_operand(map, x, "apply");
  CMatrix out = CMatrix::Zero(map.dim(), map.dim());
  for (const auto& m : map.operators()) out.noalias() += m * x * m.adjoint();
  return out;
}

CMatrix apply_dual(const KrausMap& map, const CMatrix& x) {
  check_square_operand(map, x, "apply_dual");
  CMatrix out = CMatrix::Zero(map.dim(), map.dim());
  for (const auto& m : map.operators()) out.noalias() += m.adjoint() * x * m;
  return out;
}

CMatrix Superoperator::operator()(const CMatrix& x) const {
  if (x.rows() != dim_in || x.cols() != dim_in) throw DimensionError("superoperator operand size");
  return unvec(matrix * vec(x), dim_out);
}

Superoperator Superoperator::adjoint() const { return {dim_out, dim_in, matrix.adjoint()}; }

Superoperator superoperator_from_blocks(const std::vector<CMatrix>& blocks, Index dim_in,
                                        Index dim_out) {
  Superoperator s{dim_in, dim_out, CMatrix::Zero(dim_out * dim_out, dim_in * dim_in)};
  for (const auto& a : blocks) {
    if (a.rows() != dim_out || a.cols() != dim_in) throw DimensionError("block shape mismatch");
    s.matrix += kron(a.conjugate(), a);
  }
  return s;
}

Superoperator superoperator(const KrausMap& map) {
  return superoperator_from_blocks(map.operators(), map.dim(), map.dim());
}

CMatrix BlockDecomposedMap::combined_basis() const {
  CMatrix v(s_space.ambient_dim(), s_space.dim() + r_space.dim());
  v << s_space.basis(), r_space.basis();
  return v;
}

CMatrix BlockDecomposedMap::rotated(std::size_t k) const {
  const auto& b = blocks.at(k);
  const Index m = s_space.dim();
  const Index r = r_space.dim();
  CMatrix out(m + r, m + r);
  out.topLeftCorner(m, m) = b.s;
  out.topRightCorner(m, r) = b.p;
  out.bottomLeftCorner(r, m) = b.q;
  out.bottomRightCorner(r, r) = b.r;
  return out;
}

BlockDecomposedMap block_decompose(const KrausMap& map, const SubspaceBasis& h_s) {
  check_subspace(map, h_s);
  BlockDecomposedMap out{h_s, orth_complement(h_s), {}};
  const CMatrix& vs = out.s_space.basis();
  const CMatrix& vr = out.r_space.basis();
  out.blocks.reserve(map.size());
  for (const auto& m : map.operators()) {
    const CMatrix ms = m * vs;
    const CMatrix mr = m * vr;
    out.blocks.push_back({vs.adjoint() * ms, vs.adjoint() * mr, vr.adjoint() * ms, vr.adjoint() * mr});
  }
  return out;
}

ReducedMaps reduced_maps(const KrausMap& map, const SubspaceBasis& h_s) {
  const auto bd = block_decompose(map, h_s);
  const Index m = bd.s_space.dim();
  const Index r = bd.r_space.dim();
  std::vector<CMatrix> s_blocks, r_blocks, p_blocks;
  for (const auto& b : bd.blocks) {
    s_blocks.push_back(b.s);
    r_blocks.push_back(b.r);
    p_blocks.push_back(b.p);
  }
  ReducedMaps out{bd.s_space, bd.r_space, superoperator_from_blocks(s_blocks, m, m),
                  superoperator_from_blocks(r_blocks, r, r),
                  superoperator_from_blocks(p_blocks, r, m)};

  // Kraus-independent route: T_SR(A_R) = Pi_S T(A_R) Pi_S.
  const CMatrix& vs = bd.s_space.basis();
  const CMatrix& vr = bd.r_space.basis();
  const double scale = std::max(1.0, map.scale() * map.scale());
  for (Index j = 0; j < r; ++j) {
    for (Index i = 0; i < r; ++i) {
      const CMatrix a = vr.col(i) * vr.col(j).adjoint();
      const CMatrix direct = vs.adjoint() * qds::apply(map, a) * vs;
      const CMatrix via_blocks = unvec(out.t_sr.matrix.col(i + j * r), m);
      if ((direct - via_blocks).norm() > 1e-10 * scale) {
        throw InternalInconsistencyError("reduced map T_SR disagrees with Pi_S T(.) Pi_S");
      }
    }
  }
  return out;
}

SubspaceBasis support_of_state_set(std::span<const CMatrix> states, TolPolicy policy) {
  if (states.empty()) throw DimensionError("support_of_state_set: empty state list");
  const Index d = states.front().rows();
  SubspaceBasis acc = SubspaceBasis::zero(d);
  for (const auto& x : states) {
    if (x.rows() != d || x.cols() != d) throw DimensionError("support_of_state_set: size mismatch");
    const double scale = std::max(1.0, x.norm());
    if (hermiticity_defect(x) > tol::kHerm * scale) {
      throw PreconditionError("support_of_state_set: operator is not Hermitian");
    }
    if (min_eigenvalue(x) < -tol::kRank * scale) {
      throw PreconditionError("support_of_state_set: operator is not PSD");
    }
    acc = subspace_sum(acc, range(hermitian_part(x), policy));
  }
  return acc;
}

InvarianceReport check_invariance(const KrausMap& map, const SubspaceBasis& h_s) {
  check_subspace(map, h_s);
  InvarianceReport rep;
  rep.threshold = tol::kInv * map.scale();
  if (h_s.is_zero() || h_s.is_full()) {
    rep.invariant = true;
    return rep;
  }
  const auto bd = block_decompose(map, h_s);
  double q_sq = 0.0;
  for (const auto& b : bd.blocks) {
    rep.residual = std::max(rep.residual, b.q.norm());
    q_sq += b.q.squaredNorm();
  }

  // Tr(Pi_R T(Pi_S)) = sum_k ||M_k,Q||_F^2, evaluated through apply().
  const CMatrix& vr = bd.r_space.basis();
  const CMatrix image = qds::apply(map, h_s.projector());
  const double leak_sq = (vr.adjoint() * image * vr).trace().real();
  rep.support_leak = std::sqrt(std::max(0.0, leak_sq));

  const double scale_sq = std::max(1.0, map.scale() * map.scale());
  const double roundoff = 1e-12 * scale_sq * static_cast<double>(map.size() * map.dim());
  if (std::abs(leak_sq - q_sq) > roundoff + 1e-8 * q_sq) {
    throw InternalInconsistencyError("invariance: Q-block mass " + std::to_string(q_sq) +
                                     " disagrees with the leaked trace " + std::to_string(leak_sq));
  }
  const bool by_blocks = rep.residual <= rep.threshold;
  rep.invariant = by_blocks;
  return rep;
}

bool is_subharmonic(const KrausMap& map, const SubspaceBasis& h_s) {
  check_subspace(map, h_s);
  if (!validate(map).is_tp) throw PreconditionError("is_subharmonic requires a TP map");
  const CMatrix pi = h_s.projector();
  return min_eigenvalue(qds::apply_dual(map, pi) - pi) >= -tol::kRank;
}

std::vector<SubspaceBasis> dual_support_sequence(const KrausMap& map, const SubspaceBasis& h_s,
                                                 int max_steps) {
  check_subspace(map, h_s);
  if (!validate(map).is_tp) throw PreconditionError("dual_support_sequence requires a TP map");
  const auto inv = check_invariance(map, h_s);
  if (!inv.invariant) {
    throw NotInvariantError("dual_support_sequence: subspace is not invariant", inv.residual);
  }
  // supp(T^*(X)) depends only on supp(X) for X >= 0, so iterating on the
  // projector of the previous support gives supp(T^{*n}(Pi_S)) without the
  // entries decaying geometrically.
  std::vector<SubspaceBasis> seq{h_s};
  for (int n = 0; n < max_steps; ++n) {
    const SubspaceBasis& cur = seq.back();
    SubspaceBasis next = range(qds::apply_dual(map, cur.projector()));
    if (!is_contained(cur, next, 1e-8)) {
      throw InternalInconsistencyError("dual support sequence decreased");
    }
    const bool stalled = next.dim() == cur.dim();
    seq.push_back(std::move(next));
    if (stalled) break;
  }
  return seq;
}

}  // namespace qds
