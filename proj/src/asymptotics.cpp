#include "qds/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "qds/did.hpp"
#include "qds/errors.hpp"

namespace qds {

namespace {

void check_parts_shape(const KrausMap& map, const std::vector<SubspaceBasis>& parts) {
  if (parts.empty()) throw PreconditionError("no target subspaces given");
  for (const auto& p : parts) {
    if (p.ambient_dim() != map.dim()) throw DimensionError("target subspace dimension mismatch");
  }
  for (std::size_t i = 0; i < parts.size(); ++i) {
    for (std::size_t j = i + 1; j < parts.size(); ++j) {
      if ((parts[i].basis().adjoint() * parts[j].basis()).norm() > tol::kOrth) {
        throw PreconditionError("target subspaces " + std::to_string(i + 1) + " and " +
                                std::to_string(j + 1) + " are not orthogonal");
      }
    }
  }
}

SubspaceBasis union_of(const KrausMap& map, const std::vector<SubspaceBasis>& parts) {
  SubspaceBasis s = SubspaceBasis::zero(map.dim());
  for (const auto& p : parts) s = subspace_sum(s, p);
  return s;
}

// Everything the closed-form expressions need, after the precondition gate.
struct Prepared {
  SubspaceBasis s_space;
  ReducedMaps reduced;
  std::vector<CMatrix> part_projectors_s;  // Pi_{S_i} in H_S coordinates
  Eigen::PartialPivLU<CMatrix> resolvent;  // I - T_R
};

Prepared prepare(const KrausMap& map, const std::vector<SubspaceBasis>& parts,
                 const AsymptoticOptions& opts) {
  check_parts_shape(map, parts);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto inv = check_invariance(map, parts[i]);
    if (!inv.invariant) {
      throw NotInvariantError("target subspace " + std::to_string(i + 1) + " is not invariant",
                              inv.residual);
    }
  }
  if (!dual_step_identity_check(map, parts)) {
    throw InternalInconsistencyError("one-step dual identity fails on invariant parts");
  }
  SubspaceBasis s = union_of(map, parts);
  if (!opts.gas_verified && !is_gas_did(map, s)) {
    throw NotGasError("the sum of the target subspaces is not GAS");
  }
  ReducedMaps rm = reduced_maps(map, s);
  std::vector<CMatrix> proj_s;
  for (const auto& p : parts) {
    const CMatrix c = s.basis().adjoint() * p.basis();
    proj_s.push_back(c * c.adjoint());
  }
  const Index r2 = rm.t_r.matrix.rows();
  Eigen::PartialPivLU<CMatrix> lu;
  if (r2 > 0) lu.compute(CMatrix::Identity(r2, r2) - rm.t_r.matrix);
  return {std::move(s), std::move(rm), std::move(proj_s), std::move(lu)};
}

std::vector<double> probabilities_from(const Prepared& prep, const std::vector<SubspaceBasis>& parts,
                                       const CMatrix& rho) {
  const Index m = prep.s_space.dim();
  const Index r = prep.reduced.r_space.dim();
  CMatrix transferred = CMatrix::Zero(m, m);
  if (r > 0) {
    const CMatrix rho_r = prep.reduced.r_space.basis().adjoint() * rho * prep.reduced.r_space.basis();
    const CVector x = prep.resolvent.solve(vec(rho_r));
    transferred = unvec(prep.reduced.t_sr.matrix * x, m);
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const double initial = (parts[i].projector() * rho).trace().real();
    out.push_back(initial + (prep.part_projectors_s[i] * transferred).trace().real());
  }
  return out;
}

std::vector<CMatrix> limit_duals_from(const Prepared& prep, const std::vector<SubspaceBasis>& parts) {
  const Index r = prep.reduced.r_space.dim();
  const CMatrix& vr = prep.reduced.r_space.basis();
  std::vector<CMatrix> out;
  Eigen::PartialPivLU<CMatrix> dual_lu;
  if (r > 0) {
    dual_lu.compute(CMatrix::Identity(r * r, r * r) - prep.reduced.t_r.matrix.adjoint());
  }
  for (std::size_t i = 0; i < parts.size(); ++i) {
    CMatrix l = parts[i].projector();
    if (r > 0) {
      const CVector rhs = prep.reduced.t_sr.matrix.adjoint() * vec(prep.part_projectors_s[i]);
      const CMatrix y = unvec(dual_lu.solve(rhs), r);
      l += vr * y * vr.adjoint();
    }
    out.push_back(hermitian_part(l));
  }
  return out;
}

}  // namespace

std::vector<double> asymptotic_probability(const KrausMap& map, const std::vector<SubspaceBasis>& parts,
                                           const DensityOperator& rho, const AsymptoticOptions& opts) {
  if (rho.dim() != map.dim()) throw DimensionError("state dimension mismatch");
  const Prepared prep = prepare(map, parts, opts);
  return probabilities_from(prep, parts, rho.matrix());
}

std::vector<CMatrix> limit_dual_projection(const KrausMap& map, const std::vector<SubspaceBasis>& parts,
                                           const AsymptoticOptions& opts) {
  const Prepared prep = prepare(map, parts, opts);
  return limit_duals_from(prep, parts);
}

DensityOperator iterate_oracle(const KrausMap& map, const DensityOperator& rho, int n_steps) {
  if (rho.dim() != map.dim()) throw DimensionError("state dimension mismatch");
  CMatrix x = rho.matrix();
  for (int n = 0; n < n_steps; ++n) {
    x = qds::apply(map, x);
    if (std::abs(x.trace() - Complex(1.0)) > 1e-9) {
      throw PreconditionError("iterate_oracle: trace drifted at step " + std::to_string(n + 1));
    }
  }
  // Renormalize the last-bit drift so the result is a valid density operator.
  x = hermitian_part(x) / x.trace().real();
  return DensityOperator(std::move(x));
}

bool dual_step_identity_check(const KrausMap& map, const std::vector<SubspaceBasis>& parts) {
  check_parts_shape(map, parts);
  const SubspaceBasis s = union_of(map, parts);
  const auto bd = block_decompose(map, s);
  const CMatrix v = bd.combined_basis();
  const Index m = s.dim();
  const Index r = bd.r_space.dim();
  for (const auto& part : parts) {
    const CMatrix c = s.basis().adjoint() * part.basis();
    const CMatrix pi_s = c * c.adjoint();
    CMatrix expected_r = CMatrix::Zero(r, r);
    for (const auto& b : bd.blocks) expected_r += b.p.adjoint() * pi_s * b.p;
    const CMatrix got = v.adjoint() * qds::apply_dual(map, part.projector()) * v;
    const double defect = (got.topLeftCorner(m, m) - pi_s).norm() +
                          got.topRightCorner(m, r).norm() + got.bottomLeftCorner(r, m).norm() +
                          (got.bottomRightCorner(r, r) - expected_r).norm();
    if (defect > 1e-10 * std::max(1.0, map.scale() * map.scale())) return false;
  }
  return true;
}

AsymptoticReport asymptotic_report(const KrausMap& map, const std::vector<SubspaceBasis>& parts,
                                   const DensityOperator& rho, const AsymptoticOptions& opts) {
  if (rho.dim() != map.dim()) throw DimensionError("state dimension mismatch");
  const Prepared prep = prepare(map, parts, opts);
  AsymptoticReport rep;
  rep.targets = parts;
  rep.limit_duals = limit_duals_from(prep, parts);
  rep.raw_probabilities = probabilities_from(prep, parts, rho.matrix());
  double total = 0.0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const double raw = rep.raw_probabilities[i];
    total += raw;
    const double clamped = std::clamp(raw, 0.0, 1.0);
    if (std::abs(clamped - raw) > 1e-8) {
      rep.warnings.push_back("probability of part " + std::to_string(i + 1) + " clamped from " +
                             std::to_string(raw));
    }
    rep.probabilities.push_back(clamped);
    const double via_dual = (rep.limit_duals[i] * rho.matrix()).trace().real();
    if (std::abs(via_dual - raw) > 1e-10) {
      throw InternalInconsistencyError("limit dual and closed-form probability disagree for part " +
                                       std::to_string(i + 1));
    }
  }
  rep.remainder = 1.0 - total;
  return rep;
}

}  // namespace qds
