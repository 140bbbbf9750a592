#include "qds/did.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qds/errors.hpp"

namespace qds {

namespace {

struct StackedSvd {
  RVector singular_values;
  CMatrix v;  // full right singular vectors
  Index rank = 0;
};

StackedSvd stacked_svd(const CMatrix& stacked) {
  StackedSvd out;
  Eigen::JacobiSVD<CMatrix> svd(stacked, Eigen::ComputeFullV);
  out.singular_values = svd.singularValues();
  out.v = svd.matrixV();
  const double smax = out.singular_values.size() ? out.singular_values(0) : 0.0;
  if (smax > tol::kAbs) {
    while (out.rank < out.singular_values.size() &&
           out.singular_values(out.rank) > tol::kRank * smax) {
      ++out.rank;
    }
  }
  return out;
}

RateBounds rate_bounds(const KrausMap& map, const SubspaceBasis& from, const SubspaceBasis& to) {
  CMatrix gram = CMatrix::Zero(from.dim(), from.dim());
  for (const auto& m : map.operators()) {
    const CMatrix p = to.basis().adjoint() * m * from.basis();
    gram += p.adjoint() * p;
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(gram), Eigen::EigenvaluesOnly);
  return {es.eigenvalues()(0), es.eigenvalues()(es.eigenvalues().size() - 1)};
}

void check_block_form(const DidResult& res, double threshold) {
  const std::size_t nb = res.offsets.size() - 1;
  const std::size_t last = nb - 1;
  for (std::size_t k = 0; k < res.block_form.size(); ++k) {
    for (std::size_t a = 0; a < nb; ++a) {
      for (std::size_t b = 0; b < nb; ++b) {
        bool must_vanish = (b == 0 && a > 0) || (b >= a + 2);
        if (!res.successful() && nb >= 2 && b == last && a + 1 == last) must_vanish = true;
        if (must_vanish && res.block(k, a, b).norm() > threshold) {
          throw InternalInconsistencyError("did: block (" + std::to_string(a) + "," +
                                           std::to_string(b) + ") of Kraus operator " +
                                           std::to_string(k) + " does not vanish");
        }
      }
    }
  }
}

}  // namespace

CMatrix DidResult::block(std::size_t k, std::size_t a, std::size_t b) const {
  const Index r0 = offsets.at(a), r1 = offsets.at(a + 1);
  const Index c0 = offsets.at(b), c1 = offsets.at(b + 1);
  return block_form.at(k).block(r0, c0, r1 - r0, c1 - c0);
}

DidResult did(const KrausMap& map, const SubspaceBasis& h_s) {
  if (h_s.ambient_dim() != map.dim()) throw DimensionError("did: subspace dimension mismatch");
  const auto inv = check_invariance(map, h_s);
  if (!inv.invariant) throw NotInvariantError("did: starting subspace is not invariant", inv.residual);

  const Index d = map.dim();
  const double zero_block_tol = tol::kInv * map.scale();
  DidResult res;
  res.target = h_s;
  res.outcome = DidOutcome::kSuccessful;
  res.trapped = SubspaceBasis::zero(d);

  SubspaceBasis s_i = h_s;
  SubspaceBasis r_i = orth_complement(h_s);
  SubspaceBasis previous = h_s;
  while (!r_i.is_zero()) {
    // Stacked P'-blocks: S_i rows, R_i columns, one block per Kraus operator.
    const Index m = s_i.dim();
    const Index r = r_i.dim();
    CMatrix stacked(m * static_cast<Index>(map.size()), r);
    for (std::size_t k = 0; k < map.size(); ++k) {
      stacked.middleRows(static_cast<Index>(k) * m, m) = s_i.basis().adjoint() * map[k] * r_i.basis();
    }

    bool terminal = false;
    SubspaceBasis transient;
    SubspaceBasis r_next;
    if (stacked.norm() <= zero_block_tol) {
      // Nothing in R_i reaches S_i: R_i is trapped.
      res.outcome = DidOutcome::kUnsuccessful;
      transient = r_i;
      terminal = true;
    } else {
      const StackedSvd svd = stacked_svd(stacked);
      if (svd.rank == r) {
        transient = r_i;
        terminal = true;
      } else {
        CMatrix t_basis = r_i.basis() * svd.v.leftCols(svd.rank);
        canonicalize_phases(t_basis);
        transient = SubspaceBasis(std::move(t_basis), 1e-9);
        CMatrix n_basis = r_i.basis() * svd.v.rightCols(r - svd.rank);
        canonicalize_phases(n_basis);
        r_next = SubspaceBasis(std::move(n_basis), 1e-9);
      }
    }

    DidStage stage;
    if (res.successful()) {
      const RateBounds b = rate_bounds(map, transient, previous);
      stage.gamma_min = b.gamma_min;
      stage.gamma_max = b.gamma_max;
    }
    stage.transient = transient;
    res.stages.push_back(stage);
    if (terminal) {
      if (!res.successful()) res.trapped = transient;
      break;
    }
    previous = transient;
    s_i = subspace_sum(s_i, transient);
    r_i = std::move(r_next);
  }

  // Rotated block form.
  res.did_basis = CMatrix(d, d);
  res.offsets = {0};
  Index col = 0;
  auto append = [&](const SubspaceBasis& b) {
    res.did_basis.middleCols(col, b.dim()) = b.basis();
    col += b.dim();
    res.offsets.push_back(col);
  };
  append(h_s);
  for (const auto& st : res.stages) append(st.transient);
  for (const auto& m : map.operators()) {
    res.block_form.push_back(res.did_basis.adjoint() * m * res.did_basis);
  }
  check_block_form(res, std::max(zero_block_tol, 1e-9 * map.scale()));

  if (res.successful()) {
    for (const auto& st : res.stages) {
      if (!(st.gamma_min > 0.0) || st.gamma_max > 1.0 + tol::kRank) {
        throw InternalInconsistencyError("did: transition rates out of (0, 1]: " +
                                         std::to_string(st.gamma_min) + ", " +
                                         std::to_string(st.gamma_max));
      }
    }
  } else if (!is_invariant(map, res.trapped)) {
    throw InternalInconsistencyError("did: trapped subspace is not invariant");
  }
  return res;
}

bool is_gas_did(const KrausMap& map, const SubspaceBasis& h_s) { return did(map, h_s).successful(); }

bool is_gas_dual(const KrausMap& map, const SubspaceBasis& h_s) {
  const auto seq = dual_support_sequence(map, h_s, static_cast<int>(map.dim()) + 1);
  return seq.back().is_full();
}

bool did_dual_consistency(const KrausMap& map, const SubspaceBasis& h_s) {
  const DidResult res = did(map, h_s);
  if (!res.successful()) throw PreconditionError("did_dual_consistency requires a GAS subspace");
  const auto seq = dual_support_sequence(map, h_s, static_cast<int>(res.stages.size()) + 1);
  SubspaceBasis prefix = h_s;
  for (std::size_t n = 0; n <= res.stages.size(); ++n) {
    if (n > 0) prefix = subspace_sum(prefix, res.stages[n - 1].transient);
    if (n >= seq.size() || !same_subspace(seq[n], prefix, 1e-8)) return false;
  }
  return true;
}

std::vector<RateBounds> transition_rates(const DidResult& result) {
  if (!result.successful()) throw PreconditionError("transition_rates requires a successful DID");
  std::vector<RateBounds> out;
  for (const auto& st : result.stages) out.push_back({st.gamma_min, st.gamma_max});
  return out;
}

double bottleneck_rate(const DidResult& result) {
  double b = 1.0;
  for (const auto& r : transition_rates(result)) b = std::min(b, r.gamma_min);
  return b;
}

}  // namespace qds
