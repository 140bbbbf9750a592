#include "qds/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "qds/errors.hpp"

namespace qds {

namespace {

Eigen::JacobiSVD<CMatrix> full_svd(const CMatrix& a) {
  return Eigen::JacobiSVD<CMatrix>(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
}

// Number of singular values above the policy threshold, or -1 when the
// matrix is numerically zero.
Index numerical_rank(const RVector& s, TolPolicy policy) {
  const double smax = s.size() > 0 ? s(0) : 0.0;
  if (smax <= policy.absolute) return 0;
  const double thresh = policy.relative * smax;
  Index r = 0;
  while (r < s.size() && s(r) > thresh) ++r;
  return r;
}

}  // namespace

SubspaceBasis::SubspaceBasis(CMatrix basis, double orth_tol)
    : ambient_dim_(basis.rows()), basis_(std::move(basis)) {
  if (!basis_.allFinite()) throw PreconditionError("subspace basis has non-finite entries");
  if (basis_.cols() > ambient_dim_) {
    throw PreconditionError("subspace basis has more columns than the ambient dimension");
  }
  if (basis_.cols() > 0) {
    const CMatrix gram = basis_.adjoint() * basis_;
    const double defect = (gram - CMatrix::Identity(gram.rows(), gram.cols())).norm();
    if (defect > orth_tol) {
      throw PreconditionError("subspace basis columns are not orthonormal (defect " +
                              std::to_string(defect) + ")");
    }
  }
}

SubspaceBasis SubspaceBasis::zero(Index ambient_dim) {
  return SubspaceBasis(CMatrix(ambient_dim, 0));
}

SubspaceBasis SubspaceBasis::full(Index ambient_dim) {
  return SubspaceBasis(CMatrix::Identity(ambient_dim, ambient_dim));
}

SubspaceBasis SubspaceBasis::axes(Index ambient_dim, const std::vector<Index>& indices) {
  std::vector<Index> sorted = indices;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw PreconditionError("duplicate basis index in subspace");
  }
  CMatrix b = CMatrix::Zero(ambient_dim, static_cast<Index>(sorted.size()));
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    if (sorted[j] < 0 || sorted[j] >= ambient_dim) {
      throw DimensionError("basis index " + std::to_string(sorted[j]) +
                           " outside ambient dimension " + std::to_string(ambient_dim));
    }
    b(sorted[j], static_cast<Index>(j)) = 1.0;
  }
  return SubspaceBasis(std::move(b));
}

SubspaceBasis SubspaceBasis::span_of(const CMatrix& vectors, TolPolicy policy) {
  return range(vectors, policy);
}

CMatrix SubspaceBasis::projector() const { return basis_ * basis_.adjoint(); }

std::optional<std::vector<Index>> SubspaceBasis::axis_indices(double tol) const {
  const CMatrix p = projector();
  std::vector<Index> idx;
  CMatrix rounded = CMatrix::Zero(ambient_dim_, ambient_dim_);
  for (Index i = 0; i < ambient_dim_; ++i) {
    if (std::abs(p(i, i) - 1.0) <= 0.5) {
      rounded(i, i) = 1.0;
      idx.push_back(i);
    }
  }
  if ((p - rounded).norm() > tol * std::max<Index>(1, ambient_dim_)) return std::nullopt;
  return idx;
}

double projector_distance(const SubspaceBasis& u, const SubspaceBasis& v) {
  if (u.ambient_dim() != v.ambient_dim()) throw DimensionError("subspaces live in different spaces");
  return (u.projector() - v.projector()).norm();
}

bool same_subspace(const SubspaceBasis& u, const SubspaceBasis& v, double tol) {
  return projector_distance(u, v) <= tol * std::max<Index>(1, u.ambient_dim());
}

bool is_contained(const SubspaceBasis& u, const SubspaceBasis& v, double tol) {
  if (u.ambient_dim() != v.ambient_dim()) throw DimensionError("subspaces live in different spaces");
  if (u.is_zero()) return true;
  const CMatrix residual = u.basis() - v.basis() * (v.basis().adjoint() * u.basis());
  return residual.norm() <= tol * std::max<Index>(1, u.ambient_dim());
}

SubspaceBasis kernel(const CMatrix& a, TolPolicy policy) {
  if (a.rows() == 0 || a.cols() == 0) return SubspaceBasis::full(a.cols());
  const auto svd = full_svd(a);
  const Index r = numerical_rank(svd.singularValues(), policy);
  return SubspaceBasis(svd.matrixV().rightCols(a.cols() - r));
}

SubspaceBasis range(const CMatrix& a, TolPolicy policy) {
  if (a.rows() == 0 || a.cols() == 0) return SubspaceBasis::zero(a.rows());
  const auto svd = full_svd(a);
  const Index r = numerical_rank(svd.singularValues(), policy);
  return SubspaceBasis(svd.matrixU().leftCols(r));
}

SubspaceBasis subspace_sum(const SubspaceBasis& u, const SubspaceBasis& v) {
  if (u.ambient_dim() != v.ambient_dim()) {
    throw DimensionError("subspace_sum: ambient dimensions " + std::to_string(u.ambient_dim()) +
                         " and " + std::to_string(v.ambient_dim()) + " differ");
  }
  CMatrix joined(u.ambient_dim(), u.dim() + v.dim());
  joined << u.basis(), v.basis();
  return range(joined);
}

SubspaceBasis orth_complement(const SubspaceBasis& u) {
  if (u.is_zero()) return SubspaceBasis::full(u.ambient_dim());
  return kernel(u.basis().adjoint());
}

CMatrix smallest_right_singular_vectors(const CMatrix& a, Index count) {
  if (count < 0 || count > a.cols()) throw DimensionError("requested nullity exceeds column count");
  if (a.rows() == 0) return CMatrix::Identity(a.cols(), a.cols()).rightCols(count);
  const auto svd = full_svd(a);
  return svd.matrixV().rightCols(count);
}

SpectralData::SpectralData(const CMatrix& a) : matrix_(a) {
  if (a.rows() != a.cols()) throw DimensionError("eig: matrix is not square");
  if (!a.allFinite()) throw PreconditionError("eig: matrix has non-finite entries");
  if (a.rows() == 0) return;
  Eigen::ComplexEigenSolver<CMatrix> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw NumericalDegeneracyError("eig: QR iteration failed");
  eigenvalues_ = solver.eigenvalues();
  spectral_radius_ = eigenvalues_.cwiseAbs().maxCoeff();
}

SubspaceBasis SpectralData::generalized_eigenbasis(Complex sigma, int power,
                                                   std::optional<Index> expected_dim) const {
  const Index n = matrix_.rows();
  const CMatrix shifted = matrix_ - sigma * CMatrix::Identity(n, n);
  CMatrix p = CMatrix::Identity(n, n);
  for (int i = 0; i < power; ++i) p = p * shifted;
  if (expected_dim) return SubspaceBasis(smallest_right_singular_vectors(p, *expected_dim));
  return kernel(p);
}

SpectralData eig(const CMatrix& a) { return SpectralData(a); }

CMatrix hermitian_part(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

double hermiticity_defect(const CMatrix& a) { return (a - a.adjoint()).norm(); }

double min_eigenvalue(const CMatrix& hermitian) {
  if (hermitian.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(hermitian), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double max_eigenvalue(const CMatrix& hermitian) {
  if (hermitian.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(hermitian), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

CMatrix psd_cone_project(const CMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("psd_cone_project: matrix is not square");
  if (hermiticity_defect(a) > tol::kHerm * std::max(1.0, a.norm())) {
    throw PreconditionError("psd_cone_project: input is not Hermitian");
  }
  if (a.rows() == 0) return a;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(a));
  const RVector clamped = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * clamped.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

CVector vec(const CMatrix& x) {
  return Eigen::Map<const CVector>(x.data(), x.size());
}

CMatrix unvec(const CVector& v, Index rows, Index cols) {
  if (v.size() != rows * cols) throw DimensionError("unvec: size mismatch");
  return Eigen::Map<const CMatrix>(v.data(), rows, cols);
}

void canonicalize_phases(CMatrix& columns, double rel_tol) {
  for (Index j = 0; j < columns.cols(); ++j) {
    const double n = columns.col(j).norm();
    if (n == 0.0) continue;
    for (Index i = 0; i < columns.rows(); ++i) {
      const Complex z = columns(i, j);
      if (std::abs(z) > rel_tol * n) {
        columns.col(j) *= std::conj(z) / std::abs(z);
        break;
      }
    }
  }
}

}  // namespace qds
