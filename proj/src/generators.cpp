#include "qds/generators.hpp"

#include <cmath>
#include <numeric>

#include "qds/errors.hpp"

namespace qds {

namespace {

constexpr double kSumTol = 1e-12;

void require_count(const std::vector<double>& g, std::size_t n, const std::string& name) {
  if (g.size() != n) {
    throw ConstraintError(name + " takes " + std::to_string(n) + " gammas, got " +
                          std::to_string(g.size()));
  }
}

void require_unit_sum(const std::vector<double>& g) {
  const double sum = std::accumulate(g.begin(), g.end(), 0.0);
  if (std::abs(sum - 1.0) > kSumTol) {
    throw ConstraintError("constraint violated: gammas must sum to 1 (sum = " + std::to_string(sum) + ")");
  }
}

CMatrix unit(Index d, Index row, Index col) {
  CMatrix m = CMatrix::Zero(d, d);
  m(row - 1, col - 1) = 1.0;
  return m;
}

CMatrix diag(std::initializer_list<double> entries) {
  RVector v(static_cast<Index>(entries.size()));
  Index i = 0;
  for (double e : entries) v(i++) = e;
  return v.cast<Complex>().asDiagonal();
}

}  // namespace

GeneratedChannel toy3(const std::vector<double>& gammas, bool literal) {
  require_count(gammas, 3, "toy3");
  for (double g : gammas) {
    if (!(g >= 0.0)) throw ConstraintError("constraint violated: gammas must be non-negative");
  }
  require_unit_sum(gammas);
  const CMatrix m0 = CMatrix::Identity(3, 3);
  const CMatrix m1 = unit(3, 1, 2) + unit(3, 2, 1) + unit(3, 3, 3);
  const CMatrix m2 = unit(3, 1, 3);
  std::vector<CMatrix> kraus{std::sqrt(gammas[0]) * m0, std::sqrt(gammas[1]) * m1,
                             std::sqrt(gammas[2]) * m2};
  if (!literal) kraus.push_back(std::sqrt(gammas[2]) * (unit(3, 1, 1) + unit(3, 2, 2)));
  return {"toy3",
          literal ? "three-level toy model without TP completion (not trace preserving)"
                  : "three-level toy model: identity, swap of levels 1 and 2, decay 3 -> 1",
          gammas, KrausMap(std::move(kraus))};
}

GeneratedChannel seven_level(const std::vector<double>& gammas) {
  require_count(gammas, 5, "seven_level");
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    if (!(gammas[i] > 0.0)) {
      throw ConstraintError("constraint violated: gamma" + std::to_string(i + 1) + " > 0");
    }
  }
  require_unit_sum(gammas);
  if (!(gammas[2] < gammas[3] && gammas[3] < gammas[4])) {
    throw ConstraintError("constraint violated: gamma3 < gamma4 < gamma5");
  }
  const double h = 1.0 / std::sqrt(2.0);
  const Index d = 7;

  const CMatrix n1 = unit(d, 1, 3) + unit(d, 2, 4) + unit(d, 3, 1) + unit(d, 4, 2) + unit(d, 5, 5) +
                     unit(d, 6, 6) + unit(d, 7, 7);
  const CMatrix n2 = unit(d, 1, 3) + unit(d, 2, 4) + h * (unit(d, 5, 5) + unit(d, 6, 6) + unit(d, 7, 7));
  const CMatrix n3 = unit(d, 1, 1) + unit(d, 2, 2) + h * (unit(d, 5, 5) + unit(d, 6, 6) + unit(d, 7, 7));
  const CMatrix n4 = h * (unit(d, 3, 5) + unit(d, 4, 5));
  const CMatrix n5 = diag({1, 1, 1, 1, 0, 1, 1});
  const CMatrix n6 = unit(d, 5, 6);
  const CMatrix n7 = diag({1, 1, 1, 1, 1, 0, 1});
  const CMatrix n8 = unit(d, 5, 7);
  const CMatrix n9 = diag({1, 1, 1, 1, 1, 1, 0});

  const auto s = [&](std::size_t i) { return std::sqrt(gammas[i]); };
  std::vector<CMatrix> kraus{s(0) * n1, s(1) * n2, s(1) * n3, s(2) * n4, s(2) * n5,
                             s(3) * n6, s(3) * n7, s(4) * n8, s(4) * n9};
  return {"seven_level",
          "seven-level noise model: swap (1,3)(2,4), decays 3->1 4->2, 5->{3,4}, 6->5, 7->5", gammas,
          KrausMap(std::move(kraus))};
}

GeneratedChannel generate_example(const std::string& name, const std::vector<double>& gammas,
                                  bool literal) {
  if (name == "toy3") return toy3(gammas.empty() ? std::vector<double>{0.5, 0.3, 0.2} : gammas, literal);
  if (name == "seven_level") return gammas.empty() ? seven_level() : seven_level(gammas);
  throw ParseError("unknown example '" + name + "' (expected toy3 or seven_level)");
}

}  // namespace qds
