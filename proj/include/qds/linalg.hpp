#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace qds {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace tol {
inline constexpr double kRank = 1e-10;  // relative to the largest singular value
inline constexpr double kAbs = 1e-12;   // floor when the matrix is zero
inline constexpr double kOrth = 1e-10;
inline constexpr double kHerm = 1e-9;
}  // namespace tol

struct TolPolicy {
  double relative = tol::kRank;
  double absolute = tol::kAbs;
};

// A subspace of C^d stored as a d x m isometry. m == 0 is the zero subspace.
class SubspaceBasis {
 public:
  SubspaceBasis() = default;

  // Takes ownership of `basis`; throws PreconditionError when the columns are
  // not orthonormal within `orth_tol`.
  explicit SubspaceBasis(CMatrix basis, double orth_tol = tol::kOrth);

  static SubspaceBasis zero(Index ambient_dim);
  static SubspaceBasis full(Index ambient_dim);
  // Span of computational basis vectors (0-based).
  static SubspaceBasis axes(Index ambient_dim, const std::vector<Index>& indices);
  // Orthonormalizes the columns of `vectors` (rank-revealing, drops dependent ones).
  static SubspaceBasis span_of(const CMatrix& vectors, TolPolicy policy = {});

  Index ambient_dim() const { return ambient_dim_; }
  Index dim() const { return basis_.cols(); }
  bool is_zero() const { return dim() == 0; }
  bool is_full() const { return dim() == ambient_dim_; }
  const CMatrix& basis() const { return basis_; }

  CMatrix projector() const;

  // Computational-basis indices (0-based) when the projector is diagonal with
  // 0/1 entries within `tol`.
  std::optional<std::vector<Index>> axis_indices(double tol = tol::kOrth) const;

 private:
  Index ambient_dim_ = 0;
  CMatrix basis_;
};

// ||P_U - P_V||_F.
double projector_distance(const SubspaceBasis& u, const SubspaceBasis& v);
// Subspace equality on projectors: ||P_U - P_V||_F <= tol * d.
bool same_subspace(const SubspaceBasis& u, const SubspaceBasis& v, double tol = tol::kOrth);
// U subset of V: ||(I - P_V) basis(U)||_F <= tol * d.
bool is_contained(const SubspaceBasis& u, const SubspaceBasis& v, double tol = tol::kOrth);

SubspaceBasis kernel(const CMatrix& a, TolPolicy policy = {});
SubspaceBasis range(const CMatrix& a, TolPolicy policy = {});
SubspaceBasis subspace_sum(const SubspaceBasis& u, const SubspaceBasis& v);
SubspaceBasis orth_complement(const SubspaceBasis& u);

// Right singular vectors of the `count` smallest singular values. Used when
// the nullity is known a priori and a threshold would be fragile.
CMatrix smallest_right_singular_vectors(const CMatrix& a, Index count);

class SpectralData {
 public:
  explicit SpectralData(const CMatrix& a);

  const CVector& eigenvalues() const { return eigenvalues_; }
  double spectral_radius() const { return spectral_radius_; }

  // Orthonormal basis of ker((A - sigma I)^power). With `expected_dim` the
  // nullspace is taken as that many smallest singular directions instead of
  // thresholding.
  SubspaceBasis generalized_eigenbasis(Complex sigma, int power,
                                       std::optional<Index> expected_dim = std::nullopt) const;

 private:
  CMatrix matrix_;
  CVector eigenvalues_;
  double spectral_radius_ = 0.0;
};

SpectralData eig(const CMatrix& a);

// Nearest PSD matrix in Frobenius norm. Throws PreconditionError when `a`
// is not Hermitian within tol::kHerm (relative to max(1, ||a||_F)).
CMatrix psd_cone_project(const CMatrix& a);

// --- small helpers shared across modules ---

CMatrix hermitian_part(const CMatrix& a);
double hermiticity_defect(const CMatrix& a);
// Smallest eigenvalue of the Hermitian part.
double min_eigenvalue(const CMatrix& hermitian);
double max_eigenvalue(const CMatrix& hermitian);

// Column-stacking vectorization, matching Eigen's column-major storage.
CVector vec(const CMatrix& x);
CMatrix unvec(const CVector& v, Index rows, Index cols);
inline CMatrix unvec(const CVector& v, Index n) { return unvec(v, n, n); }

// Scales each column so its first entry of magnitude above `rel_tol` times the
// column norm is real and positive.
void canonicalize_phases(CMatrix& columns, double rel_tol = 1e-8);

}  // namespace qds
