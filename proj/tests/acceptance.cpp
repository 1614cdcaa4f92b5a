// Acceptance checks. Run one with `acceptance --criterion N` (1..8) or all
// with no arguments; each prints a single PASS/FAIL line and the exit code is
// nonzero if any selected check fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "raddich/raddich.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace raddich;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

fs::path scratch_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("raddich_acceptance_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

int run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" RADDICH_CLI "\" " + args;
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

// 1. Lemma suite over the 12-case hypothesis grid through the CLI.
Outcome criterion1() {
  const auto dir = scratch_dir("c1");
  const auto out = dir / "report.json";
  const auto t0 = std::chrono::steady_clock::now();
  const int rc = run_cli("verify-lemmas --lemma all --count 100000 --seed 42 --out \"" +
                         out.string() + "\"");
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (rc != 0) return {false, "verify-lemmas exited with " + std::to_string(rc)};
  const auto report = io::parse_json(io::read_file(out), "report");
  std::size_t records = 0, bad = 0;
  double worst_unit = 0.0;
  for (const auto& r : report) {
    ++records;
    const double c = r.at("c_estimate").get<double>();
    const auto id = parse_lemma_id(r.at("lemma").get<std::string>());
    bool ok = r.at("pass").get<bool>() && std::isfinite(c);
    if (id && has_unit_bound(*id)) {
      worst_unit = std::max(worst_unit, c);
      ok = ok && c <= 1.0 + 1e-10;
    }
    bad += ok ? 0 : 1;
  }
  const bool pass = records == 12 * 9 && bad == 0 && secs <= 60.0;
  return {pass, std::to_string(records) + " reports, " + std::to_string(bad) +
                    " failing, max unit-bound ratio " + num(worst_unit) + ", " + num(secs) +
                    " s"};
}

// 2. Decay rate floor on random (H2) potentials and exact rates for λ = 1, 4.
Outcome criterion2() {
  const std::vector<double> mus{0.0, 2.0, 6.0, 12.0};
  double worst_margin = std::numeric_limits<double>::infinity();
  for (std::uint64_t i = 0; i < 20; ++i) {
    CounterRng rng(2002, 0, i);
    const int d = 1 + static_cast<int>(i % 3);
    const auto eig = eigendecompose(testsupport::random_h2_potential(rng, d));
    const auto fit = measure_decay(eig, mus, default_decay_pairs());
    worst_margin = std::min(worst_margin, fit.eta - (fit.rate_floor - 0.01));
  }
  const auto one = measure_decay(eigendecompose(PotentialMatrix::diagonal({1.0})), mus,
                                 default_decay_pairs());
  const auto four = measure_decay(eigendecompose(PotentialMatrix::diagonal({4.0})), mus,
                                  default_decay_pairs());
  const bool pass = worst_margin >= 0.0 && std::abs(one.eta - 1.0) <= 1e-3 &&
                    std::abs(four.eta - 2.0) <= 1e-3;
  return {pass, "min(eta - floor + 0.01) = " + num(worst_margin) + ", eta(1) = " +
                    num(one.eta) + ", eta(4) = " + num(four.eta)};
}

// 3. Stable factor against √r K_ν(r).
Outcome criterion3() {
  double worst = 0.0;
  for (double mu : {1.0, 6.0}) {
    const double ref = testsupport::bessel_u(mu, 3.0) / testsupport::bessel_u(mu, 1.0);
    const double got = stable_factor(1.0, mu, 1.0, 3.0).real();
    worst = std::max(worst, std::abs(got - ref) / ref);
  }
  return {worst <= 1e-5, "max relative error " + num(worst)};
}

double sinh_error(std::size_t N) {
  const auto p = solve_mode_bvp(1.0, 0.0, 1.0, 3.0, 1.0, 0.0, N);
  double err = 0.0;
  for (std::size_t i = 0; i < p.r_grid.size(); ++i)
    err = std::max(err, std::abs(p.values[i] - std::sinh(3.0 - p.r_grid[i]) / std::sinh(2.0)));
  return err;
}

// 4. BVP solver against the dense finite-difference oracle and the closed form.
Outcome criterion4() {
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    CounterRng rng(4004, 0, i);
    const cplx lambda = testsupport::random_wedge_eigenvalue(rng, 0.5);
    const double mu = rng.uniform() < 0.2 ? 0.0 : rng.log_uniform(1e-2, 40.0);
    const double r0 = rng.uniform(1.0, 2.0), r1 = r0 + rng.uniform(0.5, 3.0);
    const cplx a = rng.complex_normal(), b = rng.complex_normal();
    const auto p = solve_mode_bvp(lambda, mu, r0, r1, a, b, 256);
    const auto q = fd_oracle(lambda, mu, r0, r1, a, b, 8192);
    for (std::size_t n = 0; n < p.r_grid.size(); ++n)
      worst = std::max(worst, std::abs(p.values[n] - interpolate(q, p.r_grid[n])));
  }
  const double e1024 = sinh_error(1024);
  double min_factor = std::numeric_limits<double>::infinity();
  double prev = sinh_error(16);
  for (std::size_t N : {32u, 64u, 128u, 256u}) {
    const double e = sinh_error(N);
    min_factor = std::min(min_factor, prev / e);
    prev = e;
  }
  const bool pass = worst <= 1e-4 && e1024 <= 1e-6 && min_factor >= 3.5;
  return {pass, "oracle max-norm " + num(worst) + ", closed-form error at N=1024 " +
                    num(e1024) + ", min doubling factor " + num(min_factor)};
}

// 5. Symbol identities on 10⁴ random samples.
Outcome criterion5() {
  using ld = long double;
  double sq_err = 0.0, d_err = 0.0, add_err = 0.0;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    CounterRng rng(5005, 0, i);
    const cplx lambda = testsupport::random_wedge_eigenvalue(rng, 0.1);
    const double mu = rng.log_uniform(1e-3, 1e6), r = rng.log_uniform(1.0, 1e3);
    const cplx g = gamma(lambda, mu, r);
    const cplx z = lambda + mu / (r * r);
    sq_err = std::max(sq_err, std::abs(g * g - z) / std::abs(z));

    // Five-point difference in extended precision.
    auto gl = [&](ld s) {
      return std::sqrt(std::complex<ld>(lambda.real(), lambda.imag()) +
                       static_cast<ld>(mu) / (s * s));
    };
    const ld h = 1e-3L * r, rl = r;
    const std::complex<ld> fd =
        (gl(rl - 2 * h) - 8.0L * gl(rl - h) + 8.0L * gl(rl + h) - gl(rl + 2 * h)) / (12.0L * h);
    const cplx dg = dgamma(lambda, mu, r);
    const cplx fdd(static_cast<double>(fd.real()), static_cast<double>(fd.imag()));
    d_err = std::max(d_err, std::abs(fdd - dg) / std::abs(dg));

    double a = rng.log_uniform(1.0, 1e3), b = rng.log_uniform(1.0, 1e3), c = rng.log_uniform(1.0, 1e3);
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    if (a > b) std::swap(a, b);
    const cplx ac = integrate_gamma(lambda, mu, a, c);
    const cplx split = integrate_gamma(lambda, mu, a, b) + integrate_gamma(lambda, mu, b, c);
    add_err = std::max(add_err, std::abs(split - ac) / std::max(1.0, std::abs(ac)));
  }
  const bool pass = sq_err <= 1e-12 && d_err <= 1e-5 && add_err <= 1e-9;
  return {pass, "square " + num(sq_err) + ", derivative " + num(d_err) + ", additivity " +
                    num(add_err)};
}

// 6. Norm-equivalence constants on 10⁴ random fields per potential.
Outcome criterion6() {
  std::vector<PotentialMatrix> pots;
  for (const auto& g : hypothesis_grid()) pots.push_back(g.potential);
  for (std::uint64_t i = 0; i < 8; ++i) {
    CounterRng rng(6006, 0, i);
    pots.push_back(testsupport::random_h2_potential(rng, 1 + static_cast<int>(i % 3)));
  }
  SamplePlan plan;
  plan.seed = 6006;
  plan.count = 10000;
  plan.r_max = 100.0;
  double a = 0.0, b = 0.0;
  for (const auto& V : pots) {
    const auto eig = eigendecompose(V);
    a = std::max(a, verify_lemma(LemmaId::A7a, eig, plan).c_estimate);
    b = std::max(b, verify_lemma(LemmaId::A7b, eig, plan).c_estimate);
  }
  const bool pass = a <= 1.0 + 1e-10 && b <= 1.0 + 1e-10;
  return {pass, std::to_string(pots.size()) + " potentials, max ratio_a " + num(a) +
                    ", max ratio_b " + num(b)};
}

// 7. Mixed-power (|r₁² − r₂³|) vs cubic separation term in the ∂_rγ bound.
// Family: r₁ = r₂^{3/2} (so r₁² = r₂³ and the mixed term |r₁² − r₂³|
// vanishes), r₂ = 1 + 3·10^{−j/4} ∈ (1, 4], μ = 10⁰..10⁸, λ ∈ {1, i, near cut}.
// Unboundedness of the mixed residual is taken as a supremum above 10⁶ over
// this family; the cubic residual must stay below 10.
Outcome criterion7() {
  const std::vector<cplx> lambdas{1.0, cplx(0.0, 1.0), std::polar(1.0, std::numbers::pi - 0.15)};
  double mixed = 0.0, cubic = 0.0;
  for (cplx lambda : lambdas)
    for (double mu = 1.0; mu <= 1e8; mu *= 10.0)
      for (int j = 0; j <= 40; ++j) {
        const double r2 = 1.0 + 3.0 * std::pow(10.0, -j / 4.0);
        const double r1 = std::pow(r2, 1.5);
        mixed = std::max(mixed, a6_ratio(lambda, mu, r1, r2, A6Form::mixed));
        cubic = std::max(cubic, a6_ratio(lambda, mu, r1, r2, A6Form::cubic));
      }
  const bool unbounded = mixed > 1e6;
  const bool bounded = std::isfinite(cubic) && cubic < 10.0;
  std::string note = unbounded ? "" : "; the |r1 - r2| term keeps the mixed residual bounded";
  return {unbounded && bounded,
          "mixed sup " + num(mixed) + ", cubic sup " + num(cubic) + note};
}

// 8. Every CLI command is byte-identical across reruns and thread counts.
Outcome criterion8() {
  const auto dir = scratch_dir("c8");
  const auto cfg = dir / "cfg.json";
  io::write_atomic(cfg, R"({"d":2,"V":[[[1,0],[0.5,0]],[[0,0],[2,1]]],"K":3,"seed":9})");
  const auto field = dir / "field.json";
  {
    CounterRng rng(8008, 0, 0);
    auto u = SpectralField::from_function({3, 3}, 2, Basis::canonical,
                                          [&](int, std::int64_t, int) { return rng.complex_normal(); });
    io::write_atomic(field, io::dump(io::field_to_json(u)));
    SpectralField outer({3, 3}, 2, Basis::canonical);
    io::json bc = {{"r0", 1.0}, {"r1", 3.0}, {"inner", io::field_to_json(u)},
                   {"outer", io::field_to_json(outer)}};
    io::write_atomic(dir / "bc.json", io::dump(bc));
    bc.erase("outer");
    io::write_atomic(dir / "bc_ext.json", io::dump(bc));
  }
  const std::string c = " --config \"" + cfg.string() + "\"";
  const std::vector<std::string> commands{
      "spectrum" + c,
      "spectrum --format csv" + c,
      "verify-lemmas --lemma all --count 3000 --seed 7",
      "verify-lemmas --lemma A8 --count 1000 --seed 7",
      "verify-lemmas --lemma all --count 2000 --format csv" + c,
      "symbols dump --lambda 1,0.5 --mu 6 --r-min 1 --r-max 20 --points 64",
      "symbols dump --format json --l 2 --k 2" + c,
      "dichotomy --r-from 1 --r-to 5 --field \"" + field.string() + "\"" + c,
      "dichotomy --r-from 5 --r-to 1 --format json" + c,
      "dichotomy rates" + c,
      "solve --bc \"" + (dir / "bc.json").string() + "\" --N 128" + c,
      "solve --bc \"" + (dir / "bc_ext.json").string() + "\" --N 64 --format json" + c,
  };
  std::size_t mismatches = 0, failures = 0;
  std::string first_bad;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    std::vector<std::string> outputs;
    for (const char* threads : {"1", "1", "4"}) {
      const auto out = dir / ("out_" + std::to_string(i) + "_" + std::to_string(outputs.size()));
      const int rc = run_cli(commands[i] + " --out \"" + out.string() + "\"",
                             std::string("RD_THREADS=") + threads);
      if (rc != 0) {
        ++failures;
        if (first_bad.empty()) first_bad = commands[i] + " (exit " + std::to_string(rc) + ")";
      }
      outputs.push_back(fs::exists(out) ? io::read_file(out) : std::string());
    }
    if (outputs[0] != outputs[1] || outputs[0] != outputs[2] || outputs[0].empty()) {
      ++mismatches;
      if (first_bad.empty()) first_bad = commands[i];
    }
  }
  const bool pass = mismatches == 0 && failures == 0;
  return {pass, std::to_string(commands.size()) + " commands x 3 runs, " +
                    std::to_string(mismatches) + " mismatching, " + std::to_string(failures) +
                    " failed" + (first_bad.empty() ? "" : ", first: " + first_bad)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "Criterion number (1-8); all if omitted")->check(CLI::Range(1, 8));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<Outcome()>> checks{criterion1, criterion2, criterion3,
                                                     criterion4, criterion5, criterion6,
                                                     criterion7, criterion8};
  bool all = true;
  for (int i = 1; i <= 8; ++i) {
    if (only != 0 && only != i) continue;
    Outcome o;
    try {
      o = checks[static_cast<std::size_t>(i - 1)]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << i << ": " << (o.pass ? "PASS" : "FAIL") << " (" << o.detail
              << ")" << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
