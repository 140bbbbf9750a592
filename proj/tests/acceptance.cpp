#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "corpus.hpp"
#include "qds/asymptotics.hpp"
#include "qds/channel.hpp"
#include "qds/did.hpp"
#include "qds/generators.hpp"
#include "qds/nfd.hpp"

using namespace qds;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

SubspaceBasis axes1(Index d, std::vector<Index> one_based) {
  for (auto& i : one_based) --i;
  return SubspaceBasis::axes(d, one_based);
}

CMatrix diag(const std::vector<double>& v) {
  RVector r(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) r(static_cast<Index>(i)) = v[i];
  return r.cast<Complex>().asDiagonal();
}

const std::vector<std::vector<double>>& compliant_gammas() {
  static const std::vector<std::vector<double>> g = {
      {0.3, 0.3, 0.05, 0.15, 0.2},
      {0.1, 0.2, 0.15, 0.25, 0.3},
      {0.4, 0.1, 0.1, 0.18, 0.22},
      {0.05, 0.05, 0.01, 0.02, 0.87},
  };
  return g;
}

std::vector<SubspaceBasis> seven_parts() { return {axes1(7, {1, 3}), axes1(7, {2, 4})}; }

// ---- corpus shared by criteria 7-11 ----

struct CorpusRun {
  testing::CorpusCase c;
  NfdResult nfd;
  DidResult did;
  bool dual_gas = false;
};

std::vector<CorpusRun>& corpus_runs() {
  static std::vector<CorpusRun> runs;
  return runs;
}

const std::size_t kCorpusSize = 210;

Outcome criterion_1() {
  Outcome o;
  const auto t0 = Clock::now();
  for (const auto& g : compliant_gammas()) {
    const KrausMap map = seven_level(g).map;
    const auto p = asymptotic_probability(map, seven_parts(), DensityOperator::maximally_mixed(7));
    o.require(std::abs(p[0] - 0.5) <= 1e-9 && std::abs(p[1] - 0.5) <= 1e-9,
              "maximally mixed state gave " + num(p[0]) + ", " + num(p[1]));
    const auto q = asymptotic_probability(map, seven_parts(), DensityOperator(diag({0.5, 0, 0, 0, 0, 0, 0.5})));
    o.require(std::abs(q[0] - 0.75) <= 1e-9 && std::abs(q[1] - 0.25) <= 1e-9,
              "(|1><1|+|7><7|)/2 gave " + num(q[0]) + ", " + num(q[1]));
  }
  const double dt = seconds_since(t0);
  o.require(dt < 1.0, "runtime " + num(dt) + " s");
  if (o.pass) o.detail = "(0.5, 0.5) and (0.75, 0.25) for " + std::to_string(compliant_gammas().size()) +
                         " gamma tuples in " + num(dt) + " s";
  return o;
}

Outcome criterion_2() {
  Outcome o;
  for (const auto& g : compliant_gammas()) {
    const auto l = limit_dual_projection(seven_level(g).map, seven_parts());
    const double e0 = (l[0] - diag({1, 0, 1, 0, 0.5, 0.5, 0.5})).cwiseAbs().maxCoeff();
    const double e1 = (l[1] - diag({0, 1, 0, 1, 0.5, 0.5, 0.5})).cwiseAbs().maxCoeff();
    o.require(e0 <= 1e-9 && e1 <= 1e-9, "max entry error " + num(std::max(e0, e1)));
  }
  if (o.pass) o.detail = "both limit duals match entrywise within 1e-9";
  return o;
}

Outcome criterion_3() {
  Outcome o;
  const KrausMap map = seven_level().map;
  const auto seq = dual_support_sequence(map, axes1(7, {1, 3}), 10);
  o.require(seq.size() == 4, "sequence length " + std::to_string(seq.size()));
  if (seq.size() == 4) {
    o.require(same_subspace(seq[0], axes1(7, {1, 3})), "step 0");
    o.require(same_subspace(seq[1], axes1(7, {1, 3, 5})), "step 1");
    o.require(same_subspace(seq[2], axes1(7, {1, 3, 5, 6, 7})), "step 2");
    o.require(same_subspace(seq[3], seq[2]), "no stall");
  }
  o.require(!is_gas_dual(map, axes1(7, {1, 3})), "GAS verdict was yes");
  if (o.pass) o.detail = "{1,3} -> {1,3,5} -> {1,3,5,6,7} -> stall, GAS: no";
  return o;
}

Outcome criterion_4() {
  Outcome o;
  for (const auto& g : compliant_gammas()) {
    const auto r = nfd(seven_level(g).map, axes1(7, {1, 3}));
    o.require(r.stages.size() == 4, std::to_string(r.stages.size()) + " stages");
    if (r.stages.size() != 4) continue;
    const std::vector<std::vector<Index>> subspaces{{2, 4}, {5}, {6}, {7}};
    const std::vector<double> radii{1.0, 1.0 - g[2], 1.0 - g[3], 1.0 - g[4]};
    for (std::size_t i = 0; i < 4; ++i) {
      o.require(same_subspace(r.stages[i].transient, axes1(7, subspaces[i])), "stage " + std::to_string(i + 1));
      o.require(std::abs(r.stages[i].sigma - radii[i]) <= 1e-9,
                "radius " + std::to_string(i + 1) + " off by " + num(r.stages[i].sigma - radii[i]));
    }
    o.require(same_subspace(r.minimal_gas, axes1(7, {1, 2, 3, 4})), "minimal GAS extension");
  }
  if (o.pass) o.detail = "{2,4},{5},{6},{7} with radii 1, 1-g3, 1-g4, 1-g5; minimal GAS {1,2,3,4}";
  return o;
}

Outcome criterion_5() {
  Outcome o;
  for (const auto& g : compliant_gammas()) {
    const auto r = did(seven_level(g).map, axes1(7, {1, 2, 3, 4}));
    o.require(r.successful(), "unsuccessful");
    o.require(r.stages.size() == 2, std::to_string(r.stages.size()) + " stages");
    if (r.stages.size() != 2) continue;
    o.require(same_subspace(r.stages[0].transient, axes1(7, {5})), "stage 1");
    o.require(same_subspace(r.stages[1].transient, axes1(7, {6, 7})), "stage 2");
    o.require(std::abs(bottleneck_rate(r) - g[2]) <= 1e-12, "bottleneck " + num(bottleneck_rate(r)));
  }
  if (o.pass) o.detail = "{5} then {6,7}, successful, bottleneck = g3";
  return o;
}

Outcome criterion_6() {
  Outcome o;
  const double s = 1.0 / std::sqrt(2.0);
  CVector plus(3), minus(3);
  plus << s, s, 0.0;
  minus << s, -s, 0.0;
  const auto h_plus = SubspaceBasis::span_of(plus);
  const auto h_minus = SubspaceBasis::span_of(minus);
  for (const std::vector<double>& g : {std::vector<double>{0.5, 0.3, 0.2}, std::vector<double>{0.2, 0.1, 0.7}}) {
    const KrausMap map = toy3(g).map;
    const auto r = nfd(map, h_plus);
    o.require(r.stages.size() == 2, "NFD stage count " + std::to_string(r.stages.size()));
    if (r.stages.size() == 2) {
      o.require(same_subspace(r.stages[0].transient, h_minus), "NFD stage 1");
      o.require(std::abs(r.stages[0].sigma - 1.0) <= 1e-9, "NFD radius 1");
      o.require(same_subspace(r.stages[1].transient, axes1(3, {3})), "NFD stage 2");
      o.require(std::abs(r.stages[1].sigma - (1.0 - g[2])) <= 1e-9, "NFD radius 2");
    }
    const auto d = did(map, h_plus);
    o.require(!d.successful(), "DID successful");
    o.require(same_subspace(d.trapped, h_minus), "trapped subspace");
  }
  if (o.pass) o.detail = "NFD: (e1-e2)/sqrt2 at 1, e3 at 1-g2; DID trapped (e1-e2)/sqrt2";
  return o;
}

Outcome criterion_7() {
  Outcome o;
  const auto t0 = Clock::now();
  auto& runs = corpus_runs();
  runs.clear();
  int disagreements = 0, gas = 0;
  for (auto& c : testing::random_corpus(kCorpusSize, 20240611)) {
    o.require(c.map.dim() <= 6 && c.map.size() <= 4, "corpus bounds");
    CorpusRun run{c, nfd(c.map, c.target), did(c.map, c.target), is_gas_dual(c.map, c.target)};
    const bool a = run.nfd.is_gas, b = run.did.successful(), d = run.dual_gas;
    if (a != b || b != d) {
      ++disagreements;
      o.require(false, c.kind + ": nfd " + std::to_string(a) + ", did " + std::to_string(b) + ", dual " +
                           std::to_string(d));
    }
    gas += b ? 1 : 0;
    runs.push_back(std::move(run));
  }
  const double dt = seconds_since(t0);
  o.require(dt < 60.0, "runtime " + num(dt) + " s");
  o.require(gas > 0 && gas < static_cast<int>(runs.size()), "corpus lacks GAS or non-GAS cases");
  if (o.pass) {
    o.detail = std::to_string(runs.size()) + " channels (" + std::to_string(gas) + " GAS), " +
               std::to_string(disagreements) + " disagreements, " + num(dt) + " s";
  }
  return o;
}

Outcome criterion_8() {
  Outcome o;
  std::mt19937_64 rng(8);
  double worst = 0.0;
  int cases = 0;
  for (const auto& run : corpus_runs()) {
    SubspaceBasis u = SubspaceBasis::zero(run.c.map.dim());
    for (const auto& p : run.c.parts) u = subspace_sum(u, p);
    if (!is_gas_did(run.c.map, u)) continue;
    ++cases;
    const Index d = run.c.map.dim();
    std::vector<CMatrix> states;
    for (int s = 0; s < 20; ++s) states.push_back(testing::random_state_on(SubspaceBasis::full(d), rng));
    std::vector<std::vector<double>> closed;
    for (const auto& s : states) closed.push_back(asymptotic_probability(run.c.map, run.c.parts, DensityOperator(s)));
    for (std::size_t i = 0; i < run.c.parts.size(); ++i) {
      const auto iterated =
          testing::oracle_iterated_probability(run.c.map, states, run.c.parts[i].projector(), 2000);
      for (std::size_t s = 0; s < states.size(); ++s) {
        const double gap = std::abs(closed[s][i] - iterated[s]);
        worst = std::max(worst, gap);
        o.require(gap <= 1e-6, run.c.kind + ": gap " + num(gap));
      }
    }
  }
  o.require(cases > 0, "no GAS cases");
  if (o.pass) o.detail = std::to_string(cases) + " GAS cases x 20 states, worst gap " + num(worst);
  return o;
}

Outcome criterion_9() {
  Outcome o;
  double min_gap = 1.0;
  std::size_t multi = 0;
  for (const auto& run : corpus_runs()) {
    const auto& st = run.nfd.stages;
    if (st.size() > 1) ++multi;
    for (std::size_t i = 1; i < st.size(); ++i) {
      const double gap = st[i - 1].sigma - st[i].sigma;
      min_gap = std::min(min_gap, gap);
      o.require(gap > tol::kSpec, run.c.kind + ": radii gap " + num(gap));
    }
  }
  o.require(!corpus_runs().empty(), "empty corpus");
  if (o.pass) {
    o.detail = std::to_string(corpus_runs().size()) + " NFD runs (" + std::to_string(multi) +
               " multi-stage), smallest gap " + num(min_gap);
  }
  return o;
}

Outcome criterion_10() {
  Outcome o;
  std::mt19937_64 rng(10);
  double worst = 0.0;
  const auto& runs = corpus_runs();
  for (int trial = 0; trial < 50; ++trial) {
    const auto& run = runs[static_cast<std::size_t>(trial * 4) % runs.size()];
    const auto mixed = did(testing::remix(run.c.map, rng), run.c.target);
    o.require(mixed.stages.size() == run.did.stages.size(), run.c.kind + ": stage count changed");
    o.require(mixed.successful() == run.did.successful(), run.c.kind + ": outcome changed");
    if (mixed.stages.size() != run.did.stages.size()) continue;
    for (std::size_t i = 0; i < mixed.stages.size(); ++i) {
      const double dist = projector_distance(mixed.stages[i].transient, run.did.stages[i].transient);
      worst = std::max(worst, dist);
      o.require(dist <= 1e-8, run.c.kind + ": stage " + std::to_string(i + 1) + " moved by " + num(dist));
    }
  }
  if (o.pass) o.detail = "50 remixing trials, largest projector distance " + num(worst);
  return o;
}

Outcome criterion_11() {
  Outcome o;
  std::mt19937_64 rng(11);
  std::size_t stages = 0;
  for (const auto& run : corpus_runs()) {
    if (!run.did.successful()) continue;
    const KrausMap& map = run.c.map;
    SubspaceBasis previous = run.c.target;
    for (const auto& st : run.did.stages) {
      ++stages;
      const CMatrix pi_prev = previous.projector();
      for (int s = 0; s < 20; ++s) {
        const CMatrix rho = testing::random_state_on(st.transient, rng);
        const double inc = (pi_prev * testing::oracle_apply(map, rho)).trace().real();
        o.require(inc >= st.gamma_min - 1e-10 && inc <= st.gamma_max + 1e-10,
                  run.c.kind + ": increment " + num(inc) + " outside [" + num(st.gamma_min) + ", " +
                      num(st.gamma_max) + "]");
      }
      // Extremal states from an independent eigendecomposition of sum_k P_k^dag P_k.
      CMatrix gram = CMatrix::Zero(st.transient.dim(), st.transient.dim());
      for (const auto& m : map.operators()) {
        const CMatrix p = previous.basis().adjoint() * m * st.transient.basis();
        gram += p.adjoint() * p;
      }
      Eigen::SelfAdjointEigenSolver<CMatrix> es((gram + gram.adjoint()) / 2.0);
      const Index top = es.eigenvalues().size() - 1;
      const CVector lo = st.transient.basis() * es.eigenvectors().col(0);
      const CVector hi = st.transient.basis() * es.eigenvectors().col(top);
      const double inc_lo = (pi_prev * testing::oracle_apply(map, lo * lo.adjoint())).trace().real();
      const double inc_hi = (pi_prev * testing::oracle_apply(map, hi * hi.adjoint())).trace().real();
      o.require(std::abs(inc_lo - st.gamma_min) <= 1e-10, run.c.kind + ": lower bound not attained");
      o.require(std::abs(inc_hi - st.gamma_max) <= 1e-10, run.c.kind + ": upper bound not attained");
      previous = st.transient;
    }
  }
  o.require(stages > 0, "no successful stages");
  if (o.pass) o.detail = std::to_string(stages) + " successful stages x 20 states, extremal states attain bounds";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"seven-level asymptotic probabilities", criterion_1},
      {"seven-level limit dual operators", criterion_2},
      {"seven-level dual support sequence", criterion_3},
      {"seven-level nested-face decomposition", criterion_4},
      {"seven-level dissipation-induced decomposition", criterion_5},
      {"three-level toy model", criterion_6},
      {"three-decider agreement on random corpus", criterion_7},
      {"closed form vs iteration oracle", criterion_8},
      {"strictly decreasing NFD radii", criterion_9},
      {"DID independence of the Kraus representation", criterion_10},
      {"one-step transition rate bounds", criterion_11},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
