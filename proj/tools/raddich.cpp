// Batch front end for the raddich library.
//
//   raddich spectrum --config cfg.json [--out report.json]
//   raddich verify-lemmas [--config cfg.json] --lemma all --seed 42 --count N --out report.json
//   raddich symbols dump --lambda 1,0 --mu 2 --r-min 1 --r-max 10 --points 50
//   raddich dichotomy --config cfg.json --r-from 1 --r-to 5 [--field u.json] --out evolved.csv
//   raddich dichotomy rates --config cfg.json --out rates.json
//   raddich solve --config cfg.json --bc bc.json --r0 1 --r1 5 --N 256 --out sol.csv
//
// Exit codes: 0 success, 1 usage/input error, 2 hypothesis violation,
// 3 a verification ran but did not pass.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "raddich/raddich.hpp"

namespace {

using namespace raddich;
using io::json;

constexpr int kExitUsage = 1;
constexpr int kExitHypothesis = 2;
constexpr int kExitVerification = 3;

struct ExitWith {
  int code;
};

void diag(const std::string& level, const std::string& code, const std::string& message,
          json extra = json::object()) {
  json rec = {{"level", level}, {"code", code}, {"message", message}};
  for (auto it = extra.begin(); it != extra.end(); ++it) rec[it.key()] = it.value();
  std::cerr << rec.dump() << "\n";
}

json hypothesis_json(const HypothesisReport& h) {
  json off = json::array();
  for (cplx z : h.offending_eigenvalues) off.push_back(io::to_json(z));
  return {{"h1", h.h1},
          {"h2", h.h2},
          {"diagonalizable", h.diagonalizable},
          {"offending_eigenvalues", std::move(off)},
          {"gamma_lower", h.gamma_lower}};
}

void emit(const std::string& out, const std::string& data) {
  if (out.empty() || out == "-") {
    std::cout << data;
    std::cout.flush();
  } else {
    io::write_atomic(out, data);
  }
}

struct Common {
  std::string config;
  std::string format;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> K;
  std::optional<int> n;
};

RunConfig load_config(const Common& c, bool required) {
  RunConfig cfg;
  if (!c.config.empty()) cfg = RunConfig::parse(io::read_file(c.config));
  else if (required) throw ConfigError("--config is required");
  if (c.seed) cfg.seed = *c.seed;
  if (c.K) cfg.sphere.K = *c.K;
  if (c.n) cfg.sphere.n = *c.n;
  if (!c.format.empty()) cfg.format = parse_format(c.format);
  try {
    cfg.sphere.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

// Eigendecomposition plus the hypothesis gate shared by the numerical commands.
EigenData require_hypotheses(const RunConfig& cfg, bool need_h2) {
  const auto rep = check_hypotheses(cfg.potential);
  if (!rep.h1 || (need_h2 && !rep.h2)) {
    diag("error", "HypothesisViolation",
         need_h2 ? "potential violates hypothesis (H2)" : "potential violates hypothesis (H1)",
         {{"hypotheses", hypothesis_json(rep)}});
    throw ExitWith{kExitHypothesis};
  }
  return eigendecompose(cfg.potential);
}

SpectralField load_field(const std::string& path, const RunConfig& cfg) {
  const std::string text = io::read_file(path);
  if (std::filesystem::path(path).extension() == ".csv")
    return io::field_from_csv(text, cfg.sphere, cfg.potential.dim(), Basis::canonical);
  return io::field_from_json(io::parse_json(text, path));
}

std::string field_output(const SpectralField& u, OutputFormat f) {
  return f == OutputFormat::csv ? io::field_to_csv(u) : io::dump(io::field_to_json(u));
}

// ---------------------------------------------------------------------------

int cmd_spectrum(const Common& c) {
  const RunConfig cfg = load_config(c, true);
  const auto rep = check_hypotheses(cfg.potential);
  json j = {{"config", cfg.to_json()}, {"hypotheses", hypothesis_json(rep)}};
  std::optional<EigenData> eig;
  try {
    eig = eigendecompose(cfg.potential);
  } catch (const NonDiagonalizable& e) {
    j["eigen_error"] = e.what();
  }
  if (eig) {
    json ev = json::array();
    for (cplx z : eig->lambdas) ev.push_back(io::to_json(z));
    j["eigenvalues"] = std::move(ev);
    j["cond_R"] = eig->cond;
    j["norm_R"] = eig->norm_R;
    j["norm_R_inv"] = eig->norm_R_inv;
    j["norm_V"] = eig->potential_norm;
  }
  if (cfg.format == OutputFormat::csv && eig) {
    std::string s = "l,lambda_re,lambda_im\n";
    for (std::size_t l = 0; l < eig->lambdas.size(); ++l)
      s += std::to_string(l + 1) + "," + io::fmt(eig->lambdas[l].real()) + "," +
           io::fmt(eig->lambdas[l].imag()) + "\n";
    emit(c.out, s);
  } else {
    emit(c.out, io::dump(j));
  }
  if (!rep.h1 || !rep.h2) {
    diag("error", "HypothesisViolation", "potential violates the spectral hypotheses",
         {{"hypotheses", hypothesis_json(rep)}});
    return kExitHypothesis;
  }
  return 0;
}

struct VerifyArgs {
  std::string lemma = "all";
  std::size_t count = 1000;
  std::optional<double> mu_max, r_max;
};

int cmd_verify(const Common& c, const VerifyArgs& v) {
  const RunConfig cfg = load_config(c, false);
  std::vector<LemmaId> ids;
  if (v.lemma == "all") {
    ids.assign(std::begin(kAllLemmas), std::end(kAllLemmas));
  } else {
    auto id = parse_lemma_id(v.lemma);
    if (!id) throw ConfigError("unknown lemma '" + v.lemma + "'");
    ids.push_back(*id);
  }
  std::vector<GridCase> cases;
  if (c.config.empty()) cases = hypothesis_grid();
  else cases.push_back({"config", cfg.potential});

  SamplePlan plan;
  plan.seed = cfg.seed;
  plan.count = v.count;
  plan.sphere = cfg.sphere;
  if (v.mu_max) plan.mu_max = *v.mu_max;
  if (v.r_max) plan.r_max = *v.r_max;
  plan.validate();

  json records = json::array();
  std::string csv = "case,lemma,c_estimate,pass,lambda_re,lambda_im,mu,r1,r2\n";
  bool all_pass = true;
  for (const auto& gc : cases) {
    const EigenData eig = eigendecompose(gc.potential);
    for (LemmaId id : ids) {
      const LemmaReport rep = verify_lemma(id, eig, plan);
      all_pass = all_pass && rep.pass;
      const auto& w = rep.worst_sample;
      records.push_back({{"case", gc.name},
                         {"lemma", std::string(to_string(id))},
                         {"c_estimate", rep.c_estimate},
                         {"pass", rep.pass},
                         {"worst_sample",
                          {{"lambda", io::to_json(w.lambda)}, {"mu", w.mu}, {"r1", w.r1}, {"r2", w.r2}}}});
      csv += gc.name + "," + std::string(to_string(id)) + "," + io::fmt(rep.c_estimate) + "," +
             (rep.pass ? "true" : "false") + "," + io::fmt(w.lambda.real()) + "," +
             io::fmt(w.lambda.imag()) + "," + io::fmt(w.mu) + "," + io::fmt(w.r1) + "," +
             io::fmt(w.r2) + "\n";
    }
  }
  const bool want_csv = !c.format.empty() && cfg.format == OutputFormat::csv;
  emit(c.out, want_csv ? csv : io::dump(records));
  if (!all_pass) {
    diag("error", "VerificationFailed", "at least one lemma report did not pass");
    return kExitVerification;
  }
  return 0;
}

struct SymbolArgs {
  std::string lambda;
  std::optional<int> l;
  std::optional<double> mu;
  std::optional<int> k;
  double r_min = 1.0, r_max = 10.0;
  std::size_t points = 100;
};

cplx parse_complex_flag(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) return {io::parse_double(s), 0.0};
  return {io::parse_double(std::string_view(s).substr(0, comma)),
          io::parse_double(std::string_view(s).substr(comma + 1))};
}

int cmd_symbols(const Common& c, const SymbolArgs& a) {
  RunConfig cfg = load_config(c, false);
  cplx lambda;
  if (!a.lambda.empty()) {
    lambda = parse_complex_flag(a.lambda);
  } else {
    if (c.config.empty()) throw ConfigError("symbols dump needs --lambda or --config");
    const EigenData eig = eigendecompose(cfg.potential);
    const int l = a.l.value_or(1);
    if (l < 1 || l > eig.dim()) throw ConfigError("--l is out of range");
    lambda = eig.lambdas[static_cast<std::size_t>(l - 1)];
  }
  if (a.mu && a.k) throw ConfigError("give either --mu or --k, not both");
  const double mu = a.mu ? *a.mu : laplace_eigenvalue(a.k.value_or(0), cfg.sphere.n);
  if (a.points < 1) throw ConfigError("--points must be >= 1");
  if (!(a.r_min >= 1.0) || !(a.r_max >= a.r_min)) throw ConfigError("need 1 <= r-min <= r-max");
  if (a.points > 1 && !(a.r_max > a.r_min)) throw ConfigError("need r-max > r-min for several points");
  std::vector<double> grid(a.points);
  for (std::size_t i = 0; i < a.points; ++i)
    grid[i] = a.points == 1 ? a.r_min
              : i + 1 == a.points
                  ? a.r_max
                  : a.r_min + (a.r_max - a.r_min) * static_cast<double>(i) /
                                  static_cast<double>(a.points - 1);
  SymbolSample s;
  try {
    s = sample_symbol(lambda, mu, grid);
  } catch (const BranchCut& e) {
    diag("error", e.code(), e.what());
    return kExitHypothesis;
  }
  const bool json_out = !c.format.empty() && cfg.format == OutputFormat::json;
  emit(c.out, json_out ? io::dump(io::symbol_to_json(s)) : io::symbol_to_csv(s));
  return 0;
}

struct DichotomyArgs {
  double r_from = 1.0, r_to = 5.0;
  std::string field;
};

int cmd_dichotomy(const Common& c, const DichotomyArgs& a) {
  const RunConfig cfg = load_config(c, true);
  const EigenData eig = require_hypotheses(cfg, true);
  SpectralField u;
  if (a.field.empty()) {
    u = SpectralField(cfg.sphere, eig.dim(), Basis::canonical,
                      std::vector<cplx>(ModeTable(cfg.sphere, eig.dim()).size(), cplx(1.0)));
  } else {
    u = load_field(a.field, cfg);
  }
  if (u.d() != eig.dim()) throw ConfigError("field dimension d does not match the potential");
  const Basis in_basis = u.basis();
  const SpectralField ue = to_eigen_basis(u, eig);
  DichotomyOptions opt;
  opt.riccati = cfg.tol.riccati();
  if (!(a.r_from >= 1.0) || !(a.r_to >= 1.0)) throw ConfigError("radii must be >= 1");
  opt.r_min = std::min({1.0, a.r_from, a.r_to});
  const SpectralField ve = a.r_to >= a.r_from ? stable_propagate(ue, eig, a.r_from, a.r_to, opt)
                                              : unstable_propagate(ue, eig, a.r_from, a.r_to, opt);
  const SpectralField v = in_basis == Basis::canonical ? to_canonical_basis(ve, eig) : ve;
  emit(c.out, field_output(v, cfg.format));
  return 0;
}

int cmd_rates(const Common& c) {
  const RunConfig cfg = load_config(c, true);
  const EigenData eig = require_hypotheses(cfg, true);
  std::vector<double> mus;
  for (int k = 0; k <= cfg.sphere.K; ++k) mus.push_back(laplace_eigenvalue(k, cfg.sphere.n));
  DichotomyOptions opt;
  opt.riccati = cfg.tol.riccati();
  const DecayFit fit = measure_decay(eig, mus, default_decay_pairs(), opt);
  json pairs = json::array();
  for (std::size_t i = 0; i < fit.pairs.size(); ++i)
    pairs.push_back({{"r1", fit.pairs[i].first}, {"r2", fit.pairs[i].second}, {"norm", fit.norms[i]}});
  json j = {{"K", fit.K},
            {"eta", fit.eta},
            {"rate_floor", fit.rate_floor},
            {"meets_floor", fit.meets_floor},
            {"pairs", std::move(pairs)}};
  if (cfg.format == OutputFormat::csv && !c.format.empty()) {
    std::string s = "r1,r2,norm\n";
    for (std::size_t i = 0; i < fit.pairs.size(); ++i)
      s += io::fmt(fit.pairs[i].first) + "," + io::fmt(fit.pairs[i].second) + "," +
           io::fmt(fit.norms[i]) + "\n";
    emit(c.out, s);
  } else {
    emit(c.out, io::dump(j));
  }
  if (!fit.meets_floor) {
    diag("error", "VerificationFailed", "fitted decay rate is below the rate floor",
         {{"eta", fit.eta}, {"rate_floor", fit.rate_floor}});
    return kExitVerification;
  }
  return 0;
}

struct SolveArgs {
  std::string bc;
  std::optional<double> r0, r1;
  std::size_t N = 256;
};

int cmd_solve(const Common& c, const SolveArgs& a) {
  const RunConfig cfg = load_config(c, true);
  const EigenData eig = require_hypotheses(cfg, false);
  if (a.bc.empty()) throw ConfigError("--bc is required");
  const json bj = io::parse_json(io::read_file(a.bc), a.bc);
  if (!bj.is_object()) throw ConfigError("boundary data must be a JSON object");
  for (auto it = bj.begin(); it != bj.end(); ++it)
    if (it.key() != "r0" && it.key() != "r1" && it.key() != "inner" && it.key() != "outer")
      throw ConfigError("unknown boundary key '" + it.key() + "'");
  if (!bj.contains("inner")) throw ConfigError("boundary data needs 'inner'");
  BoundaryData bc;
  bc.r0 = a.r0.value_or(bj.value("r0", 1.0));
  bc.r1 = a.r1.value_or(bj.value("r1", 2.0));
  const SpectralField inner = io::field_from_json(bj["inner"]);
  if (inner.d() != eig.dim()) throw ConfigError("boundary field d does not match the potential");
  const Basis in_basis = inner.basis();
  bc.inner = to_eigen_basis(inner, eig);
  if (bj.contains("outer") && !bj["outer"].is_null())
    bc.outer = to_eigen_basis(io::field_from_json(bj["outer"]), eig);
  auto profiles = solve_annulus(eig, bc, a.N);
  if (in_basis == Basis::canonical) {
    // Rotate each harmonic block back to canonical coordinates; all ℓ of one
    // (k, j) share a grid.
    const int d = eig.dim();
    for (std::size_t base = 0; base < profiles.size(); base += static_cast<std::size_t>(d)) {
      const std::size_t len = profiles[base].r_grid.size();
      VectorXc w(d);
      for (std::size_t i = 0; i < len; ++i) {
        for (int l = 0; l < d; ++l) w(l) = profiles[base + static_cast<std::size_t>(l)].values[i];
        VectorXc v = eig.R * w;
        for (int l = 0; l < d; ++l) profiles[base + static_cast<std::size_t>(l)].values[i] = v(l);
      }
    }
  }
  emit(c.out, cfg.format == OutputFormat::csv ? io::profiles_to_csv(profiles)
                                              : io::dump(io::profiles_to_json(profiles)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial dichotomy toolkit: spectral data, symbol estimates, propagators and BVP solves"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub, bool with_config = true) {
    if (with_config) sub->add_option("--config", common.config, "JSON run config");
    sub->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", common.out, "Output file (stdout if omitted)");
    sub->add_option("--seed", common.seed, "Override config seed");
    sub->add_option("--K", common.K, "Override truncation degree");
    sub->add_option("--n", common.n, "Override ambient dimension");
  };

  auto* spectrum = app.add_subcommand("spectrum", "Eigen data and hypothesis report for V");
  add_common(spectrum);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify-lemmas", "Sampled verification of the symbol estimates");
  add_common(verify);
  verify->add_option("--lemma", va.lemma, "Lemma id (A1..A8, A7a, A7b) or 'all'");
  verify->add_option("--count", va.count, "Samples per lemma and case");
  verify->add_option("--mu-max", va.mu_max, "Largest sampled mu");
  verify->add_option("--r-max", va.r_max, "Largest sampled radius");

  SymbolArgs sa;
  auto* symbols = app.add_subcommand("symbols", "Symbol tables");
  symbols->require_subcommand(1);
  auto* dump = symbols->add_subcommand("dump", "Emit gamma and d/dr gamma on a radius grid");
  add_common(dump);
  dump->add_option("--lambda", sa.lambda, "Eigenvalue as re,im");
  dump->add_option("--l", sa.l, "1-based eigenvalue index into the config potential");
  dump->add_option("--mu", sa.mu, "Degree symbol mu");
  dump->add_option("--k", sa.k, "Harmonic degree (mu = k(k+n-2))");
  dump->add_option("--r-min", sa.r_min, "First radius");
  dump->add_option("--r-max", sa.r_max, "Last radius");
  dump->add_option("--points", sa.points, "Number of radii");

  DichotomyArgs da;
  auto* dich = app.add_subcommand("dichotomy", "Propagate a field along the stable or unstable subspace");
  add_common(dich);
  dich->add_option("--r-from", da.r_from, "Start radius");
  dich->add_option("--r-to", da.r_to, "End radius (>= r-from: stable, else unstable)");
  dich->add_option("--field", da.field, "Field file (.json, or .csv in the canonical basis)");
  auto* rates = dich->add_subcommand("rates", "Fit the decay constants K, eta");
  add_common(rates);

  SolveArgs so;
  auto* solve = app.add_subcommand("solve", "Mode-wise boundary value solve on an annulus or exterior domain");
  add_common(solve);
  solve->add_option("--bc", so.bc, "Boundary data JSON {r0, r1, inner, outer?}");
  solve->add_option("--r0", so.r0, "Inner radius");
  solve->add_option("--r1", so.r1, "Outer radius");
  solve->add_option("--N", so.N, "Grid intervals on [r0, r1]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*spectrum) return cmd_spectrum(common);
    if (*verify) return cmd_verify(common, va);
    if (*dump) return cmd_symbols(common, sa);
    if (*rates) return cmd_rates(common);
    if (*dich) return cmd_dichotomy(common, da);
    if (*solve) return cmd_solve(common, so);
  } catch (const ExitWith& e) {
    return e.code;
  } catch (const HypothesisViolation& e) {
    diag("error", e.code(), e.what());
    return kExitHypothesis;
  } catch (const NonDiagonalizable& e) {
    diag("error", e.code(), e.what());
    return kExitHypothesis;
  } catch (const Error& e) {
    diag("error", e.code(), e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    diag("error", "InternalError", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
