#include "qds/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>

#include <CLI11.hpp>

#include "qds/asymptotics.hpp"
#include "qds/channel.hpp"
#include "qds/did.hpp"
#include "qds/errors.hpp"
#include "qds/generators.hpp"
#include "qds/io.hpp"
#include "qds/nfd.hpp"

namespace qds::cli {

namespace {

using io::json;

std::string fmt(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::string subscript(std::size_t n) {
  static const char* const digits[] = {"₀", "₁", "₂", "₃", "₄", "₅", "₆", "₇", "₈", "₉"};
  std::string out;
  for (char c : std::to_string(n)) out += digits[c - '0'];
  return out;
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

struct LoadedChannel {
  io::ChannelFile file;
  KrausMap map;
  ValidationReport report;
};

LoadedChannel load_channel(const std::string& path) {
  io::ChannelFile file = io::read_channel(path);
  KrausMap map(file.kraus);
  const ValidationReport report = validate(map);
  return {std::move(file), std::move(map), report};
}

struct Gammas {
  std::vector<double> values;
  std::size_t first_index = 1;
};

// toy3 numbers its rates from 0, seven_level from 1.
Gammas gammas_of(const LoadedChannel& ch) {
  if (!ch.file.metadata) return {};
  return {ch.file.metadata->gammas, ch.file.metadata->name == "toy3" ? 0u : 1u};
}

void require_tp(const LoadedChannel& ch, bool allow_non_tp) {
  if (!ch.report.is_tp && !allow_non_tp) {
    throw PreconditionError("map is not trace preserving (residual " + fmt(ch.report.tp_residual, 3) +
                            "); pass --allow-non-tp to analyze anyway");
  }
}

std::string radius_text(double sigma, const Gammas& gammas) {
  const std::string sym = symbolic_radius(sigma, gammas.values, gammas.first_index);
  if (sym.empty()) return fmt(sigma, 10);
  if (sym == "1") return sym;
  return sym + " = " + fmt(sigma, 10);
}

// ---- analyze ----

struct AnalyzeOptions {
  std::string channel;
  std::string subspace;
  std::string method = "all";
  bool json = false;
  std::optional<double> tol;
  bool allow_non_tp = false;
};

struct MethodOutcome {
  bool gas = false;
  std::string line;
  json report;
};

MethodOutcome run_dual(const KrausMap& map, const SubspaceBasis& h_s) {
  auto seq = dual_support_sequence(map, h_s, static_cast<int>(map.dim()) + 1);
  if (seq.size() > 1 && same_subspace(seq.back(), seq[seq.size() - 2])) seq.pop_back();
  MethodOutcome m;
  m.gas = seq.back().is_full();
  std::vector<std::string> names;
  json supports = json::array();
  for (const auto& s : seq) {
    names.push_back(io::format_subspace(s));
    supports.push_back(io::subspace_to_json(s));
  }
  m.line = std::string("GAS: ") + (m.gas ? "yes" : "no") + "; supports: " + join(names, " → ") +
           (m.gas ? " (complete)" : " (stalled)");
  m.report = {{"gas", m.gas}, {"supports", supports}};
  return m;
}

MethodOutcome run_did(const KrausMap& map, const SubspaceBasis& h_s) {
  const DidResult r = did(map, h_s);
  MethodOutcome m;
  m.gas = r.successful();
  std::vector<std::string> names;
  json stages = json::array();
  for (std::size_t i = 0; i < r.stages.size(); ++i) {
    const auto& st = r.stages[i];
    const bool trapped = !r.successful() && i + 1 == r.stages.size();
    std::string name = io::format_subspace(st.transient);
    json js = {{"transient", io::subspace_to_json(st.transient)}, {"trapped", trapped}};
    if (!trapped) {
      name += " (γmin=" + fmt(st.gamma_min) + ", γmax=" + fmt(st.gamma_max) + ")";
      js["gamma_min"] = st.gamma_min;
      js["gamma_max"] = st.gamma_max;
    }
    names.push_back(name);
    stages.push_back(std::move(js));
  }
  m.line = std::string("GAS: ") + (m.gas ? "yes" : "no") + "; stages: " +
           (names.empty() ? std::string("none") : join(names, ", "));
  m.report = {{"gas", m.gas},
              {"outcome", m.gas ? "successful" : "unsuccessful"},
              {"stages", stages}};
  if (m.gas) {
    const double b = bottleneck_rate(r);
    m.line += "; bottleneck " + fmt(b);
    m.report["bottleneck"] = b;
  } else {
    m.line += "; trapped: " + io::format_subspace(r.trapped);
    m.report["trapped"] = io::subspace_to_json(r.trapped);
  }
  return m;
}

MethodOutcome run_nfd(const KrausMap& map, const SubspaceBasis& h_s, const Gammas& gammas,
                      const AnalyzeOptions& opt) {
  NfdOptions nopts;
  if (opt.tol) nopts.spectral_tol = *opt.tol;
  const NfdResult r = nfd(map, h_s, nopts);
  MethodOutcome m;
  m.gas = r.is_gas;
  std::vector<std::string> radii;
  std::vector<std::string> names;
  json stages = json::array();
  for (const auto& st : r.stages) {
    radii.push_back(radius_text(st.sigma, gammas));
    names.push_back(io::format_subspace(st.transient));
    json js = {{"transient", io::subspace_to_json(st.transient)}, {"sigma", st.sigma}};
    const std::string sym = symbolic_radius(st.sigma, gammas.values, gammas.first_index);
    if (!sym.empty()) js["sigma_symbolic"] = sym;
    stages.push_back(std::move(js));
  }
  m.line = std::string("GAS: ") + (m.gas ? "yes" : "no") + "; radii: " +
           (radii.empty() ? std::string("none") : join(radii, ", ")) + "; stages: " +
           (names.empty() ? std::string("none") : join(names, ", ")) +
           "; minimal GAS extension: " + io::format_subspace(r.minimal_gas);
  m.report = {{"gas", m.gas}, {"stages", stages}, {"minimal_gas", io::subspace_to_json(r.minimal_gas)}};
  return m;
}

int cmd_analyze(const AnalyzeOptions& opt, std::ostream& out) {
  const LoadedChannel ch = load_channel(opt.channel);
  require_tp(ch, opt.allow_non_tp);
  const SubspaceBasis h_s = io::parse_subspace(opt.subspace, ch.map.dim());

  const InvarianceReport inv = check_invariance(ch.map, h_s);
  if (!inv.invariant) {
    throw NotInvariantError("subspace " + io::format_subspace(h_s) +
                                " is not invariant: max_k ||M_k,Q||_F = " + fmt(inv.residual, 3),
                            inv.residual);
  }

  const Gammas gammas = gammas_of(ch);
  std::vector<std::pair<std::string, MethodOutcome>> results;
  if (opt.method == "nfd" || opt.method == "all") results.emplace_back("nfd", run_nfd(ch.map, h_s, gammas, opt));
  if (opt.method == "did" || opt.method == "all") results.emplace_back("did", run_did(ch.map, h_s));
  if (opt.method == "dual" || opt.method == "all") results.emplace_back("dual", run_dual(ch.map, h_s));

  const bool gas = results.front().second.gas;
  const bool agree = std::all_of(results.begin(), results.end(),
                                 [&](const auto& r) { return r.second.gas == gas; });

  if (opt.json) {
    json rep = {{"schema", io::kReportSchema},
                {"command", "analyze"},
                {"target", io::subspace_to_json(h_s)},
                {"invariance", {{"residual", inv.residual}, {"support_leak", inv.support_leak}}},
                {"gas", gas},
                {"agreement", agree}};
    for (const auto& [name, r] : results) rep[name] = r.report;
    out << rep.dump() << "\n";
  } else {
    out << "target: " << io::format_subspace(h_s) << "\n";
    for (const auto& [name, r] : results) {
      out << (results.size() > 1 ? name + ": " : "") << r.line << "\n";
    }
  }
  if (!agree) {
    throw InternalInconsistencyError("GAS deciders disagree on " + io::format_subspace(h_s));
  }
  return gas ? kPositive : kNegative;
}

// ---- asympt ----

struct AsymptOptions {
  std::string channel;
  std::string parts;
  std::string state = "maximally-mixed";
  int oracle = 0;
  bool json = false;
};

int cmd_asympt(const AsymptOptions& opt, std::ostream& out) {
  const LoadedChannel ch = load_channel(opt.channel);
  require_tp(ch, false);
  const auto parts = io::parse_subspace_parts(opt.parts, ch.map.dim());
  const DensityOperator rho = opt.state == "maximally-mixed" ? DensityOperator::maximally_mixed(ch.map.dim())
                                                            : io::read_state(opt.state, ch.map.dim());
  const AsymptoticReport rep = asymptotic_report(ch.map, parts, rho);

  std::vector<double> oracle;
  double gap = 0.0;
  if (opt.oracle > 0) {
    const DensityOperator rho_n = iterate_oracle(ch.map, rho, opt.oracle);
    for (std::size_t i = 0; i < parts.size(); ++i) {
      oracle.push_back((parts[i].projector() * rho_n.matrix()).trace().real());
      gap = std::max(gap, std::abs(oracle.back() - rep.raw_probabilities[i]));
    }
  }

  if (opt.json) {
    json targets = json::array();
    json duals = json::array();
    for (const auto& p : parts) targets.push_back(io::subspace_to_json(p));
    for (const auto& l : rep.limit_duals) duals.push_back(io::matrix_to_json(l));
    json j = {{"schema", io::kReportSchema},
              {"command", "asympt"},
              {"targets", targets},
              {"limit_duals", duals},
              {"probabilities", rep.probabilities},
              {"raw_probabilities", rep.raw_probabilities},
              {"remainder", rep.remainder},
              {"warnings", rep.warnings}};
    if (opt.oracle > 0) {
      j["oracle"] = {{"steps", opt.oracle}, {"probabilities", oracle}, {"max_gap", gap}};
    }
    out << j.dump() << "\n";
  } else {
    std::vector<std::string> names;
    std::vector<std::string> probs;
    for (const auto& p : parts) names.push_back(io::format_subspace(p));
    for (double p : rep.probabilities) probs.push_back(fmt(p, 10));
    out << "parts: " << join(names, "; ") << "\n";
    out << "probabilities: " << join(probs, ", ") << "\n";
    out << "remainder: " << fmt(rep.remainder, 3) << "\n";
    if (opt.oracle > 0) {
      std::vector<std::string> os;
      for (double p : oracle) os.push_back(fmt(p, 10));
      out << "oracle (n=" << opt.oracle << "): " << join(os, ", ") << "; max gap " << fmt(gap, 3) << "\n";
    }
    for (const auto& w : rep.warnings) out << "warning: " << w << "\n";
  }
  return kPositive;
}

// ---- validate / example ----

int cmd_validate(const std::string& path, bool as_json, std::ostream& out) {
  const LoadedChannel ch = load_channel(path);
  if (as_json) {
    json j = {{"schema", io::kReportSchema},
              {"command", "validate"},
              {"tp", ch.report.is_tp},
              {"residual", ch.report.tp_residual},
              {"kraus_count", ch.report.kraus_count},
              {"dim", ch.report.dim}};
    out << j.dump() << "\n";
  } else {
    out << "TP: " << (ch.report.is_tp ? "yes" : "no") << " (residual " << fmt(ch.report.tp_residual, 2)
        << ")\n";
    out << "K: " << ch.report.kraus_count << "\n";
    out << "d: " << ch.report.dim << "\n";
  }
  return ch.report.is_tp ? kPositive : kNegative;
}

int cmd_example(const std::string& name, const std::vector<double>& gammas, bool literal,
                const std::string& output, std::ostream& out) {
  const GeneratedChannel g = generate_example(name, gammas, literal);
  io::ChannelFile file{g.map.dim(), g.map.operators(), io::ChannelMetadata{g.name, g.description, g.gammas}};
  const std::string text = io::write_channel(file);
  if (output.empty() || output == "-") {
    out << text;
  } else {
    std::ofstream f(output, std::ios::binary);
    if (!f) throw ParseError("cannot write '" + output + "'");
    f << text;
  }
  return kPositive;
}

}  // namespace

std::string symbolic_radius(double sigma, const std::vector<double>& gammas, std::size_t first_index) {
  constexpr double kMatch = 1e-9;
  if (std::abs(sigma - 1.0) <= kMatch) return "1";
  std::string found;
  int matches = 0;
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    if (std::abs(sigma - (1.0 - gammas[i])) <= kMatch) {
      ++matches;
      found = "1−γ" + subscript(i + first_index);
    }
  }
  return matches == 1 ? found : std::string();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Analysis of discrete-time quantum dynamical semigroups given in Kraus form", "qds"};
  app.require_subcommand(1);

  std::string validate_file;
  bool validate_json = false;
  auto* validate_cmd = app.add_subcommand("validate", "Check trace preservation of a channel file");
  validate_cmd->add_option("file", validate_file, "Channel file")->required();
  validate_cmd->add_flag("--json", validate_json, "Machine-readable report");

  AnalyzeOptions an;
  auto* analyze_cmd = app.add_subcommand("analyze", "Decide whether an invariant subspace is GAS");
  analyze_cmd->add_option("file", an.channel, "Channel file")->required();
  analyze_cmd->add_option("--subspace", an.subspace, "1-based indices (e.g. 1,3) or @vectors.json")->required();
  analyze_cmd->add_option("--method", an.method, "nfd, did, dual or all")
      ->check(CLI::IsMember({"nfd", "did", "dual", "all"}));
  analyze_cmd->add_flag("--json", an.json, "Machine-readable report");
  analyze_cmd->add_option("--tol", an.tol, "Spectral tolerance for radius comparisons");
  analyze_cmd->add_flag("--allow-non-tp", an.allow_non_tp, "Analyze maps that are not trace preserving");

  AsymptOptions as;
  auto* asympt_cmd = app.add_subcommand("asympt", "Asymptotic probabilities onto invariant parts");
  asympt_cmd->add_option("file", as.channel, "Channel file")->required();
  asympt_cmd->add_option("--parts", as.parts, "Subspaces separated by ';' (e.g. \"1,3;2,4\")")->required();
  asympt_cmd->add_option("--state", as.state, "State file or 'maximally-mixed'");
  asympt_cmd->add_option("--oracle", as.oracle, "Also iterate the map this many steps")
      ->check(CLI::NonNegativeNumber);
  asympt_cmd->add_flag("--json", as.json, "Machine-readable report");

  std::string example_name;
  std::vector<double> example_gammas;
  std::string example_out;
  auto* example_cmd = app.add_subcommand("example", "Write a built-in example channel");
  example_cmd->add_option("name", example_name, "toy3 or seven_level")
      ->required()
      ->check(CLI::IsMember({"toy3", "seven_level"}));
  example_cmd->add_option("--gammas", example_gammas, "Comma-separated probabilities")->delimiter(',');
  example_cmd->add_option("-o,--output", example_out, "Output file (default stdout)");
  bool example_literal = false;
  example_cmd->add_flag("--literal", example_literal, "toy3 only: omit the TP-completing operator");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPositive : kInputError;
  }

  try {
    if (validate_cmd->parsed()) return cmd_validate(validate_file, validate_json, out);
    if (analyze_cmd->parsed()) return cmd_analyze(an, out);
    if (asympt_cmd->parsed()) return cmd_asympt(as, out);
    if (example_cmd->parsed()) return cmd_example(example_name, example_gammas, example_literal, example_out, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return kNegative;
  } catch (const ConstraintError& e) {
    err << "error: " << e.what() << "\n";
    return kNegative;
  } catch (const InternalInconsistencyError& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  } catch (const NumericalDegeneracyError& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kInputError;
}

}  // namespace qds::cli
