#include "qds/nfd.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "qds/errors.hpp"

namespace qds {

namespace {

// Defective eigenvalues split into a cluster of radius ~eps^(1/p); the
// cluster mean is accurate to working precision.
constexpr double kClusterTol = 1e-5;
constexpr double kRealSnapTol = 1e-8;

// Orthonormal real coordinates of an n x n Hermitian matrix under the
// Hilbert-Schmidt inner product: diagonal, then sqrt(2) Re / sqrt(2) Im of the
// strict upper triangle.
RVector herm_to_real(const CMatrix& x) {
  const Index n = x.rows();
  RVector v(n * n);
  Index k = 0;
  for (Index i = 0; i < n; ++i) v(k++) = x(i, i).real();
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < j; ++i) {
      v(k++) = std::sqrt(2.0) * x(i, j).real();
      v(k++) = std::sqrt(2.0) * x(i, j).imag();
    }
  }
  return v;
}

CMatrix real_to_herm(const RVector& v, Index n) {
  CMatrix x(n, n);
  Index k = 0;
  for (Index i = 0; i < n; ++i) x(i, i) = v(k++);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < j; ++i) {
      const double re = v(k++) / std::sqrt(2.0);
      const double im = v(k++) / std::sqrt(2.0);
      x(i, j) = Complex(re, im);
      x(j, i) = Complex(re, -im);
    }
  }
  return x;
}

// The trace-one slice {B c : t.c = 1} of a Hermitian subspace with
// orthonormal real basis B.
class TraceSlice {
 public:
  TraceSlice(RMatrix basis, Index n) : basis_(std::move(basis)), n_(n) {
    trace_ = basis_.transpose() * herm_to_real(CMatrix::Identity(n, n));
  }

  double trace_norm() const { return trace_.norm(); }

  RVector project(const RVector& x) const {
    RVector c = basis_.transpose() * x;
    c += (1.0 - trace_.dot(c)) / trace_.squaredNorm() * trace_;
    return basis_ * c;
  }

  // The element with coordinates t / |t|^2, lying on the slice.
  RVector anchor() const { return basis_ * (trace_ / trace_.squaredNorm()); }

  Index n() const { return n_; }

 private:
  RMatrix basis_;
  RVector trace_;
  Index n_;
};

RVector psd_project_real(const RVector& x, Index n) {
  return herm_to_real(psd_cone_project(real_to_herm(x, n)));
}

// Dykstra's alternating projections between the slice and the PSD cone.
RVector dykstra(const TraceSlice& slice, RVector x, const PeripheralOptions& opts) {
  RVector p = RVector::Zero(x.size());
  RVector q = RVector::Zero(x.size());
  for (int it = 0; it < opts.dykstra_max_iter; ++it) {
    const RVector y = slice.project(x + p);
    p = x + p - y;
    const RVector x_next = psd_project_real(y + q, slice.n());
    q = y + q - x_next;
    const double step = (x_next - x).norm();
    x = x_next;
    if (step < opts.dykstra_step_tol) break;
  }
  return x;
}

std::string describe_spectrum(const CVector& ev) {
  std::ostringstream os;
  os << "eigenvalues:";
  for (Index i = 0; i < ev.size(); ++i) os << ' ' << ev(i);
  return os.str();
}

}  // namespace

PeripheralFace peripheral_face_support(const Superoperator& t_r, const PeripheralOptions& opts) {
  const Index n = t_r.dim_in;
  if (n == 0 || t_r.dim_out != n) throw DimensionError("peripheral_face_support: bad reduced map");
  const Index n2 = n * n;

  const SpectralData spec = eig(t_r.matrix);
  const double radius = spec.spectral_radius();
  std::vector<Complex> cluster;
  for (Index i = 0; i < spec.eigenvalues().size(); ++i) {
    if (std::abs(spec.eigenvalues()(i) - radius) <= kClusterTol * std::max(1.0, radius)) {
      cluster.push_back(spec.eigenvalues()(i));
    }
  }
  Complex mean(0.0);
  for (const auto& z : cluster) mean += z;
  if (!cluster.empty()) mean /= static_cast<double>(cluster.size());
  if (cluster.empty() || std::abs(mean.imag()) > kRealSnapTol) {
    throw NumericalDegeneracyError("no real eigenvalue at the spectral radius " +
                                   std::to_string(radius) + "; " +
                                   describe_spectrum(spec.eigenvalues()));
  }
  PeripheralFace face;
  face.sigma = std::max(0.0, mean.real());
  const auto p = static_cast<Index>(cluster.size());
  face.eigenspace_dim = p;

  // The algebraic multiplicity bounds the nilpotency index.
  const SubspaceBasis g = spec.generalized_eigenbasis(face.sigma, static_cast<int>(p), p);

  // Hermitian basis of G (closed under adjoint).
  RMatrix herm_candidates(n2, 2 * p);
  for (Index j = 0; j < p; ++j) {
    const CMatrix x = unvec(g.basis().col(j), n);
    herm_candidates.col(2 * j) = herm_to_real(0.5 * (x + x.adjoint()));
    herm_candidates.col(2 * j + 1) = herm_to_real(Complex(0.0, -0.5) * (x - x.adjoint()));
  }
  Eigen::JacobiSVD<RMatrix> hsvd(herm_candidates, Eigen::ComputeThinU);
  const RVector& hs = hsvd.singularValues();
  if (hs(p - 1) <= 1e-8 * hs(0)) {
    throw NumericalDegeneracyError("generalized eigenspace is not closed under adjoint; " +
                                   describe_spectrum(spec.eigenvalues()));
  }
  const TraceSlice slice(hsvd.matrixU().leftCols(p), n);
  if (slice.trace_norm() <= 1e-12) {
    throw NumericalDegeneracyError("generalized eigenspace at sigma = " + std::to_string(face.sigma) +
                                   " has no element of nonzero trace");
  }

  std::vector<CMatrix> accepted;
  auto try_accept = [&](const RVector& candidate) {
    const CMatrix x = real_to_herm(candidate, n);
    if (min_eigenvalue(x) >= -tol::kRank * std::max(1.0, x.norm())) accepted.push_back(x);
  };

  if (p == 1) {
    try_accept(slice.anchor());
  } else {
    // Riesz projection of the identity onto G along range((T - sigma)^p).
    // Exact for a semisimple sigma, where it carries the full support.
    {
      const CMatrix shifted = t_r.matrix - face.sigma * CMatrix::Identity(n2, n2);
      CMatrix power = CMatrix::Identity(n2, n2);
      for (Index i = 0; i < p; ++i) power = power * shifted;
      Eigen::JacobiSVD<CMatrix> svd(power, Eigen::ComputeFullU);
      CMatrix split(n2, n2);
      split << g.basis(), svd.matrixU().leftCols(n2 - p);
      const CVector coeffs = split.fullPivLu().solve(vec(CMatrix::Identity(n, n)));
      const CMatrix proj = unvec(g.basis() * coeffs.head(p), n);
      const Complex tr = proj.trace();
      if (std::abs(tr) > 1e-12) try_accept(slice.project(herm_to_real(hermitian_part(proj / tr))));
    }

    std::vector<RVector> seeds;
    if (face.sigma > 1e-12) {
      CMatrix x = CMatrix::Identity(n, n) / static_cast<double>(n);
      CMatrix sum = CMatrix::Zero(n, n);
      for (int k = 0; k < opts.cesaro_terms; ++k) {
        sum += x;
        x = t_r(x) / face.sigma;
      }
      seeds.push_back(herm_to_real(hermitian_part(sum / sum.trace())));
    }
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss;
    while (static_cast<int>(seeds.size()) < opts.restarts) {
      RVector s(n2);
      for (Index i = 0; i < n2; ++i) s(i) = gauss(rng);
      seeds.push_back(s / s.norm());
    }
    for (const auto& seed : seeds) {
      const RVector x = dykstra(slice, seed, opts);
      const RVector y = slice.project(x);
      if ((x - y).norm() <= tol::kOrth) try_accept(y);
    }
  }

  face.accepted_elements = static_cast<int>(accepted.size());
  if (accepted.empty()) {
    throw NumericalDegeneracyError("no PSD element found in the generalized eigenspace at sigma = " +
                                   std::to_string(face.sigma) + " (dim " + std::to_string(p) +
                                   "); " + describe_spectrum(spec.eigenvalues()));
  }
  face.support = support_of_state_set(accepted, TolPolicy{opts.support_rel_tol, tol::kAbs});
  if (face.support.is_zero()) {
    throw NumericalDegeneracyError("PSD elements of the generalized eigenspace vanish numerically");
  }

  // The support of an invariant cone is invariant.
  if (!face.support.is_full()) {
    const CMatrix image = t_r(face.support.projector());
    const SubspaceBasis outside = orth_complement(face.support);
    const double leak = (outside.basis().adjoint() * image * outside.basis()).norm();
    if (leak > 1e-8 * std::max(1.0, image.norm())) {
      throw InternalInconsistencyError("peripheral face support is not invariant (leak " +
                                       std::to_string(leak) + ")");
    }
  }
  return face;
}

NfdResult nfd(const KrausMap& map, const SubspaceBasis& h_s, const NfdOptions& opts) {
  if (h_s.ambient_dim() != map.dim()) throw DimensionError("nfd: subspace dimension mismatch");
  const auto inv = check_invariance(map, h_s);
  if (!inv.invariant) throw NotInvariantError("nfd: starting subspace is not invariant", inv.residual);

  NfdResult out;
  out.target = h_s;
  out.chain.push_back(h_s);
  while (!out.chain.back().is_full()) {
    const SubspaceBasis& current = out.chain.back();
    const ReducedMaps rm = reduced_maps(map, current);
    const PeripheralFace face = peripheral_face_support(rm.t_r, opts.peripheral);
    SubspaceBasis transient(rm.r_space.basis() * face.support.basis());

    if (!out.stages.empty() && !(out.stages.back().sigma - face.sigma > opts.spectral_tol)) {
      throw InternalInconsistencyError("nfd: spectral radii not strictly decreasing (" +
                                       std::to_string(out.stages.back().sigma) + " then " +
                                       std::to_string(face.sigma) + ")");
    }

    SubspaceBasis next = subspace_sum(current, transient);
    if (next.dim() != current.dim() + transient.dim()) {
      throw InternalInconsistencyError("nfd: transient subspace overlaps the current one");
    }
    const auto next_inv = check_invariance(map, next);
    if (!next_inv.invariant) {
      throw InternalInconsistencyError("nfd: enlarged subspace is not invariant (residual " +
                                       std::to_string(next_inv.residual) + ")");
    }
    out.stages.push_back({std::move(transient), face.sigma});
    out.chain.push_back(std::move(next));
  }

  out.is_gas = out.stages.empty() || out.stages.front().sigma < 1.0 - opts.spectral_tol;
  out.minimal_gas = out.is_gas ? h_s : out.chain.at(1);
  return out;
}

}  // namespace qds
