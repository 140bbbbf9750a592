#include "corpus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace qds::testing {

namespace {

struct Template {
  std::string kind;
  int blocks;
  // coupling[a][b] (a < b): block b feeds block a.
  std::vector<std::vector<int>> coupling;
  int target_blocks;
};

const std::vector<Template>& templates() {
  static const std::vector<Template> t = {
      {"two-block-gas", 2, {{0, 1}, {0, 0}}, 1},
      {"two-block-disconnected", 2, {{0, 0}, {0, 0}}, 1},
      {"three-block-chain", 3, {{0, 1, 0}, {0, 0, 1}, {0, 0, 0}}, 1},
      {"three-block-broken-chain", 3, {{0, 1, 0}, {0, 0, 0}, {0, 0, 0}}, 1},
      {"three-block-side-trap", 3, {{0, 0, 1}, {0, 0, 1}, {0, 0, 0}}, 1},
      {"three-block-two-parts", 3, {{0, 0, 1}, {0, 0, 1}, {0, 0, 0}}, 2},
      {"three-block-full", 3, {{0, 1, 1}, {0, 0, 1}, {0, 0, 0}}, 1},
  };
  return t;
}

std::vector<Index> random_sizes(Index d, int blocks, std::mt19937_64& rng) {
  std::vector<Index> sizes(static_cast<std::size_t>(blocks), 1);
  std::uniform_int_distribution<int> pick(0, blocks - 1);
  for (Index extra = d - blocks; extra > 0; --extra) ++sizes[static_cast<std::size_t>(pick(rng))];
  return sizes;
}

SubspaceBasis columns(const CMatrix& u, Index start, Index count) {
  return SubspaceBasis(u.middleCols(start, count));
}

}  // namespace

CMatrix random_gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = Complex(n(rng), n(rng));
  return m;
}

CMatrix random_unitary(Index n, std::mt19937_64& rng) {
  const CMatrix g = random_gaussian(n, n, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < n; ++i) q.col(i) *= std::polar(1.0, std::arg(r(i, i)));
  return q;
}

CMatrix random_state_on(const SubspaceBasis& support, std::mt19937_64& rng) {
  const CMatrix g = support.basis() * random_gaussian(support.dim(), support.dim(), rng);
  const CMatrix rho = g * g.adjoint();
  const CMatrix herm = (rho + rho.adjoint()) / 2.0;
  return herm / herm.trace().real();
}

KrausMap remix(const KrausMap& map, std::mt19937_64& rng) {
  const Index k = static_cast<Index>(map.size());
  const CMatrix u = random_unitary(k, rng);
  std::vector<CMatrix> out;
  for (Index j = 0; j < k; ++j) {
    CMatrix m = CMatrix::Zero(map.dim(), map.dim());
    for (Index i = 0; i < k; ++i) m += u(j, i) * map[static_cast<std::size_t>(i)];
    out.push_back(std::move(m));
  }
  return KrausMap(std::move(out));
}

std::vector<CorpusCase> random_corpus(std::size_t count, std::uint64_t seed, Index max_dim,
                                      std::size_t max_kraus) {
  std::mt19937_64 rng(seed);
  std::vector<CorpusCase> out;
  const auto& tpl = templates();
  for (std::size_t n = 0; n < count; ++n) {
    const Template& t = tpl[n % tpl.size()];
    const Index d = std::uniform_int_distribution<Index>(t.blocks, max_dim)(rng);
    // Every eighth case is a single Kraus operator, i.e. a unitary channel.
    const std::size_t kraus_count =
        (n % 8 == 7) ? 1 : std::uniform_int_distribution<std::size_t>(2, max_kraus)(rng);
    const auto sizes = random_sizes(d, t.blocks, rng);
    std::vector<Index> offsets(sizes.size() + 1, 0);
    std::partial_sum(sizes.begin(), sizes.end(), offsets.begin() + 1);

    std::vector<CMatrix> kraus;
    for (std::size_t k = 0; k < kraus_count; ++k) {
      CMatrix m = CMatrix::Zero(d, d);
      for (int a = 0; a < t.blocks; ++a) {
        for (int b = a; b < t.blocks; ++b) {
          if (a != b && !t.coupling[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]) continue;
          m.block(offsets[a], offsets[b], sizes[a], sizes[b]) = random_gaussian(sizes[a], sizes[b], rng);
        }
      }
      kraus.push_back(std::move(m));
    }
    // Right-multiplying by the inverse upper Cholesky factor keeps the zero pattern.
    CMatrix s = CMatrix::Zero(d, d);
    for (const auto& m : kraus) s += m.adjoint() * m;
    const Eigen::LLT<CMatrix> llt(s);
    const CMatrix c = llt.matrixU();
    const CMatrix c_inv = c.triangularView<Eigen::Upper>().solve(CMatrix::Identity(d, d));

    const CMatrix u = random_unitary(d, rng);
    for (auto& m : kraus) m = u * (m * c_inv) * u.adjoint();

    CorpusCase cc{t.kind + "/d" + std::to_string(d) + "/K" + std::to_string(kraus_count),
                  KrausMap(std::move(kraus)), columns(u, 0, offsets[t.target_blocks]), {}};
    if (t.target_blocks == 1) {
      cc.parts.push_back(cc.target);
    } else {
      for (int b = 0; b < t.target_blocks; ++b) cc.parts.push_back(columns(u, offsets[b], sizes[b]));
    }
    out.push_back(std::move(cc));
  }
  return out;
}

CMatrix oracle_apply(const KrausMap& map, const CMatrix& x) {
  CMatrix y = CMatrix::Zero(x.rows(), x.cols());
  for (const auto& m : map.operators()) y.noalias() += m * x * m.adjoint();
  return y;
}

double oracle_reduced_radius(const KrausMap& map, const SubspaceBasis& h_s) {
  const Index d = map.dim();
  Eigen::FullPivHouseholderQR<CMatrix> qr(h_s.basis());
  const CMatrix q = qr.matrixQ();
  const Index r = d - h_s.dim();
  if (r == 0) return 0.0;
  const CMatrix vr = q.rightCols(r);
  CMatrix t(r * r, r * r);
  for (Index j = 0; j < r; ++j) {
    for (Index i = 0; i < r; ++i) {
      const CMatrix e = vr.col(i) * vr.col(j).adjoint();
      const CMatrix img = vr.adjoint() * oracle_apply(map, e) * vr;
      t.col(i + j * r) = Eigen::Map<const CVector>(img.data(), r * r);
    }
  }
  Eigen::ComplexEigenSolver<CMatrix> es(t, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

std::vector<double> oracle_iterated_probability(const KrausMap& map, const std::vector<CMatrix>& states,
                                                const CMatrix& projector, int steps) {
  const Index d = map.dim();
  CMatrix t = CMatrix::Zero(d * d, d * d);
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < d; ++i) {
      CMatrix e = CMatrix::Zero(d, d);
      e(i, j) = 1.0;
      const CMatrix img = oracle_apply(map, e);
      t.col(i + j * d) = Eigen::Map<const CVector>(img.data(), d * d);
    }
  }
  CMatrix x(d * d, static_cast<Index>(states.size()));
  for (std::size_t s = 0; s < states.size(); ++s) {
    x.col(static_cast<Index>(s)) = Eigen::Map<const CVector>(states[s].data(), d * d);
  }
  CMatrix next(x.rows(), x.cols());
  for (int n = 0; n < steps; ++n) {
    next.noalias() = t * x;
    x.swap(next);
  }
  std::vector<double> out;
  for (Index s = 0; s < x.cols(); ++s) {
    const CMatrix rho = Eigen::Map<const CMatrix>(x.col(s).data(), d, d);
    out.push_back((projector * rho).trace().real());
  }
  return out;
}

}  // namespace qds::testing
