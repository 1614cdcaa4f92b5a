#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "raddich/dichotomy.hpp"
#include "raddich/error.hpp"
#include "raddich/harmonics.hpp"
#include "raddich/parallel.hpp"
#include "raddich/random.hpp"
#include "raddich/spectral.hpp"
#include "raddich/symbols.hpp"

namespace raddich {

// Sampled checks of the symbol estimates. Each lemma reduces to a residual
// ratio LHS / RHS-core per sample; the report publishes the empirical
// supremum (the estimated constant) and the sample that attains it.

enum class LemmaId { A1, A2, A3, A4, A5, A6, A7a, A7b, A8 };

inline constexpr LemmaId kAllLemmas[] = {LemmaId::A1, LemmaId::A2,  LemmaId::A3,
                                         LemmaId::A4, LemmaId::A5,  LemmaId::A6,
                                         LemmaId::A7a, LemmaId::A7b, LemmaId::A8};

inline std::string_view to_string(LemmaId id) {
  switch (id) {
    case LemmaId::A1: return "A1";
    case LemmaId::A2: return "A2";
    case LemmaId::A3: return "A3";
    case LemmaId::A4: return "A4";
    case LemmaId::A5: return "A5";
    case LemmaId::A6: return "A6";
    case LemmaId::A7a: return "A7a";
    case LemmaId::A7b: return "A7b";
    case LemmaId::A8: return "A8";
  }
  return "?";
}

inline std::optional<LemmaId> parse_lemma_id(std::string_view s) {
  for (LemmaId id : kAllLemmas)
    if (to_string(id) == s) return id;
  return std::nullopt;
}

/// Lemmas whose ratio must not exceed 1 (their constants are explicit).
inline bool has_unit_bound(LemmaId id) {
  return id == LemmaId::A1 || id == LemmaId::A7a || id == LemmaId::A7b ||
         id == LemmaId::A8;
}

inline constexpr double kUnitBoundSlack = 1e-10;

struct LambdaBox {
  double re_min = -1.0, re_max = 1.0;
  double im_min = -1.0, im_max = 1.0;
};

enum class Pairing { free, ratio_bounded };

struct SamplePlan {
  std::uint64_t seed = 42;
  std::size_t count = 1000;
  /// When set, scalar lemmas draw λ from this box instead of from the
  /// eigenvalues of V∞.
  std::optional<LambdaBox> lambda_box;
  /// Box draws keep |arg λ| ≤ π − wedge_margin.
  double wedge_margin = 0.1;
  double mu_max = 1e6;
  double r_max = 1e3;
  double xi_max = 1e6;
  /// Radius pairing for A2. A4–A6 always use their proximity conditions.
  Pairing pairing = Pairing::free;
  /// Truncation of the random fields used by A1, A7a and A7b.
  SphereSpec sphere{3, 4};

  void validate() const {
    if (count == 0) throw DomainError("sample count must be positive");
    if (!(mu_max >= 0.0) || !std::isfinite(mu_max)) throw DomainError("mu_max must be >= 0");
    if (!(r_max >= 1.0) || !std::isfinite(r_max)) throw DomainError("r_max must be >= 1");
    if (!(xi_max > 0.0)) throw DomainError("xi_max must be > 0");
    if (!(wedge_margin > 0.0 && wedge_margin < std::numbers::pi))
      throw DomainError("wedge margin must lie in (0, pi)");
    sphere.validate();
    if (lambda_box) {
      const auto& b = *lambda_box;
      if (!(b.re_min <= b.re_max && b.im_min <= b.im_max))
        throw DomainError("lambda box is empty");
    }
  }
};

/// Parameters of one sample. Field lemmas record the λ attaining Γ, the
/// largest degree symbol of the truncation and r1 = r2 = r. A3 records
/// λ = A + iB, mu = ξ² and r1 = r2 = 1.
struct LemmaSample {
  cplx lambda;
  double mu = 0.0;
  double r1 = 1.0;
  double r2 = 1.0;
};

struct LemmaReport {
  LemmaId lemma = LemmaId::A1;
  std::vector<double> ratios;
  double c_estimate = 0.0;
  LemmaSample worst_sample;
  bool pass = false;
};

// ---------------------------------------------------------------------------
// Residual ratios. Differences of γ and ∂_rγ are evaluated in their exact
// single-fraction forms so that nearly coincident radii do not cancel.

/// √μ / √(1+μ).
inline double a1_scalar_ratio(double mu) { return std::sqrt(mu) / std::sqrt(1.0 + mu); }

/// Σμ_k‖u_{kj}‖² / ‖u‖²_{H¹}; 0 for the zero field.
inline double a1_field_ratio(const SpectralField& u) {
  const double h1 = norm(u, NormKind::H1);
  return h1 == 0.0 ? 0.0 : mu_weighted_sum(u) / (h1 * h1);
}

/// [((λ^re + μ/r₂²)² + (λ^im)²)^{1/4}] / |γ(r₁) + γ(r₂)|.
inline double a2_ratio(cplx lambda, double mu, double r1, double r2) {
  const double core = std::sqrt(std::abs(lambda + mu / (r2 * r2)));
  return core / std::abs(gamma(lambda, mu, r1) + gamma(lambda, mu, r2));
}

/// f(ξ) = ξ / [(A + ξ²)² + B²]^{1/4}.
inline double a3_ratio(double A, double B, double xi) {
  if (!(A > 0.0 || B != 0.0)) throw DomainError("f(xi) bound needs A > 0 or B != 0");
  const double s = A + xi * xi;
  return xi / std::sqrt(std::hypot(s, B));
}

/// γ(r₁) − γ(r₂) = μ(r₂ − r₁)(r₂ + r₁) / (r₁²r₂²(γ(r₁) + γ(r₂))).
inline cplx gamma_difference(cplx lambda, double mu, double r1, double r2) {
  const cplx g1 = gamma(lambda, mu, r1), g2 = gamma(lambda, mu, r2);
  return mu * (r2 - r1) * (r2 + r1) / (r1 * r1 * r2 * r2 * (g1 + g2));
}

/// |γ(r₁) − γ(r₂)| / ((1+μ)^{1/2}|r₁ − r₂|).
inline double a4_ratio(cplx lambda, double mu, double r1, double r2) {
  if (r1 == r2) return 0.0;
  return std::abs(gamma_difference(lambda, mu, r1, r2)) /
         (std::sqrt(1.0 + mu) * std::abs(r1 - r2));
}

/// γ(r) − γ(r′) − ∂_rγ(r′)(r − r′), written as (r − r′)² times a bracket
/// that stays regular as r → r′.
inline cplx gamma_taylor_remainder(cplx lambda, double mu, double r, double rp) {
  const cplx g = gamma(lambda, mu, r), gp = gamma(lambda, mu, rp);
  const cplx s = g + gp;
  const cplx bracket = (r + rp) * mu / (rp * std::pow(r, 4) * gp * s * s) -
                       g * (rp + r) / (rp * r * r * gp * s) - 1.0 / (rp * r * s);
  return -(r - rp) * (r - rp) * (mu / (rp * rp)) * bracket;
}

/// |γ(r) − γ(r′) − ∂_rγ(r′)(r − r′)| / ((1+μ)^{1/2}|r − r′|²).
inline double a5_ratio(cplx lambda, double mu, double r, double rp) {
  if (r == rp) return 0.0;
  return std::abs(gamma_taylor_remainder(lambda, mu, r, rp)) /
         (std::sqrt(1.0 + mu) * (r - rp) * (r - rp));
}

/// ∂_rγ(r₁) − ∂_rγ(r₂) = μ[r₁³(γ₁ − γ₂) + γ₂(r₁³ − r₂³)] / (r₁³r₂³γ₁γ₂).
inline cplx dgamma_difference(cplx lambda, double mu, double r1, double r2) {
  const cplx g1 = gamma(lambda, mu, r1), g2 = gamma(lambda, mu, r2);
  const double cube_diff = (r1 - r2) * (r1 * r1 + r1 * r2 + r2 * r2);
  const cplx num =
      std::pow(r1, 3) * gamma_difference(lambda, mu, r1, r2) + g2 * cube_diff;
  return mu * num / (std::pow(r1, 3) * std::pow(r2, 3) * g1 * g2);
}

/// Which separation term multiplies (1+μ)^{1/2} in the ∂_rγ difference bound.
enum class A6Form {
  cubic,  // |r₁ − r₂| + |r₁³ − r₂³|
  mixed,  // |r₁ − r₂| + |r₁² − r₂³|
};

inline double a6_ratio(cplx lambda, double mu, double r1, double r2,
                       A6Form form = A6Form::cubic) {
  if (r1 == r2 && form == A6Form::cubic) return 0.0;
  const double sep = form == A6Form::cubic
                         ? std::abs(r1 - r2) +
                               std::abs((r1 - r2) * (r1 * r1 + r1 * r2 + r2 * r2))
                         : std::abs(r1 - r2) + std::abs(r1 * r1 - r2 * r2 * r2);
  return std::abs(dgamma_difference(lambda, mu, r1, r2)) / (std::sqrt(1.0 + mu) * sep);
}

/// Re√λ / Re γ(r).
inline double a8_ratio(cplx lambda, double mu, double r) {
  return gamma_real_lower_bound(lambda) / gamma(lambda, mu, r).real();
}

/// A(θ) = cos(θ/2)/√(sin θ) on (0, π).
inline double auxiliary_A_theta(double theta) {
  if (!(theta > 0.0 && theta < std::numbers::pi))
    throw DomainError("A(theta) is defined on (0, pi)");
  return std::cos(0.5 * theta) / std::sqrt(std::sin(theta));
}

/// A′(θ) = −cos(θ/2) / (2 sin^{3/2} θ).
inline double auxiliary_A_theta_derivative(double theta) {
  if (!(theta > 0.0 && theta < std::numbers::pi))
    throw DomainError("A(theta) is defined on (0, pi)");
  return -std::cos(0.5 * theta) / (2.0 * std::pow(std::sin(theta), 1.5));
}

// ---------------------------------------------------------------------------

namespace detail {

inline bool requires_h2(LemmaId id) {
  return id == LemmaId::A4 || id == LemmaId::A5 || id == LemmaId::A6 ||
         id == LemmaId::A7b;
}
inline bool requires_h1(LemmaId id) {
  return id == LemmaId::A2 || id == LemmaId::A3 || id == LemmaId::A8;
}
inline bool uses_field(LemmaId id) {
  return id == LemmaId::A1 || id == LemmaId::A7a || id == LemmaId::A7b;
}

inline cplx draw_lambda(CounterRng& rng, const EigenData& eig, const SamplePlan& plan) {
  if (!plan.lambda_box) return eig.lambdas[rng.index_below(eig.lambdas.size())];
  const auto& b = *plan.lambda_box;
  const double max_arg = std::numbers::pi - plan.wedge_margin;
  for (int attempt = 0; attempt < 256; ++attempt) {
    cplx z(rng.uniform(b.re_min, b.re_max), rng.uniform(b.im_min, b.im_max));
    if (std::abs(z) > 1e-8 && std::abs(std::arg(z)) <= max_arg) return z;
  }
  throw DomainError("lambda box has (almost) no points inside the admissible wedge");
}

inline double draw_mu(CounterRng& rng, double mu_max) {
  const double u = rng.uniform();
  if (u < 0.1 || mu_max == 0.0) return 0.0;
  if (mu_max <= 1e-6) return rng.uniform(0.0, mu_max);
  return rng.log_uniform(1e-6, mu_max);
}

inline double draw_radius(CounterRng& rng, double r_max) {
  return r_max == 1.0 ? 1.0 : rng.log_uniform(1.0, r_max);
}

// r₁ in [r₂, hi] with half the mass concentrated near r₂.
inline double draw_close_above(CounterRng& rng, double r2, double hi) {
  if (hi <= r2) return r2;
  if (rng.uniform() < 0.5) return rng.uniform(r2, hi);
  return r2 + (hi - r2) * std::pow(10.0, -8.0 * rng.uniform());
}

inline SpectralField random_field(CounterRng& rng, SphereSpec spec, int d) {
  ModeTable table(spec, d);
  std::vector<cplx> c(table.size(), cplx{});
  if (rng.uniform() < 0.25) {
    const auto& deg = table.degree(static_cast<int>(rng.index_below(table.degrees().size())));
    const auto j = static_cast<std::int64_t>(rng.index_below(static_cast<std::size_t>(deg.multiplicity)));
    for (int l = 0; l < d; ++l) c[table.index(deg.k, j, l)] = rng.complex_normal();
  } else {
    const double tilt = rng.uniform(-1.5, 1.5);
    for (const auto& deg : table.degrees()) {
      const double w = std::exp(tilt * deg.k);
      for (std::int64_t j = 0; j < deg.multiplicity; ++j)
        for (int l = 0; l < d; ++l) c[table.index(deg.k, j, l)] = w * rng.complex_normal();
    }
  }
  return SpectralField(spec, d, Basis::canonical, std::move(c));
}

inline cplx gamma_floor_eigenvalue(const EigenData& eig) {
  cplx best = eig.lambdas.front();
  double g = std::numeric_limits<double>::infinity();
  for (cplx l : eig.lambdas) {
    double v = l.imag() != 0.0 ? std::abs(l.imag()) : std::abs(l.real());
    if (v < g) {
      g = v;
      best = l;
    }
  }
  return best;
}

inline double sample_ratio(LemmaId id, const EigenData& eig, const SamplePlan& plan,
                           std::size_t index, LemmaSample& s) {
  CounterRng rng(plan.seed, static_cast<std::uint64_t>(id) + 1, index);
  if (uses_field(id)) {
    const SpectralField u = random_field(rng, plan.sphere, eig.dim());
    const double r = draw_radius(rng, plan.r_max);
    s = {gamma_floor_eigenvalue(eig), laplace_eigenvalue(plan.sphere.K, plan.sphere.n), r, r};
    if (id == LemmaId::A1) {
      const double mu = draw_mu(rng, plan.mu_max);
      const double field_ratio = a1_field_ratio(u);
      const double scalar_ratio = a1_scalar_ratio(mu);
      if (scalar_ratio > field_ratio) s.mu = mu;
      return std::max(field_ratio, scalar_ratio);
    }
    const auto iso = iso_check(u, eig, r);
    return id == LemmaId::A7a ? iso.a : iso.b.value();
  }

  const cplx lambda = draw_lambda(rng, eig, plan);
  const double mu = draw_mu(rng, plan.mu_max);
  switch (id) {
    case LemmaId::A2: {
      const double r2 = draw_radius(rng, plan.r_max);
      double r1;
      if (rng.uniform() < 0.1) r1 = r2;
      else if (plan.pairing == Pairing::ratio_bounded)
        r1 = draw_close_above(rng, r2, std::min(2.0 * r2, plan.r_max));
      else
        r1 = r2 >= plan.r_max ? r2 : rng.log_uniform(r2, plan.r_max);
      s = {lambda, mu, r1, r2};
      return a2_ratio(lambda, mu, r1, r2);
    }
    case LemmaId::A3: {
      double xi;
      if (index == 0) xi = 0.0;
      else if (index == 1) xi = plan.xi_max;
      else xi = rng.log_uniform(std::min(1e-6, plan.xi_max), plan.xi_max);
      s = {lambda, xi * xi, 1.0, 1.0};
      return a3_ratio(lambda.real(), lambda.imag(), xi);
    }
    case LemmaId::A4:
    case LemmaId::A6: {
      const double r2 = draw_radius(rng, plan.r_max);
      const double r1 = draw_close_above(rng, r2, std::min(2.0 * r2, plan.r_max));
      s = {lambda, mu, r1, r2};
      return id == LemmaId::A4 ? a4_ratio(lambda, mu, r1, r2) : a6_ratio(lambda, mu, r1, r2);
    }
    case LemmaId::A5: {
      // r′/2 ≤ r < 2r′, r ≥ 1; r1 holds r and r2 holds r′.
      const double rp = draw_radius(rng, plan.r_max);
      const double lo = std::max(1.0, 0.5 * rp), hi = std::min(2.0 * rp, plan.r_max);
      double r;
      if (rng.uniform() < 0.5) {
        r = rng.uniform(lo, hi);
      } else {
        const double t = std::pow(10.0, -8.0 * rng.uniform());
        r = rng.uniform() < 0.5 ? rp + (hi - rp) * t : rp - (rp - lo) * t;
      }
      if (r >= 2.0 * rp) r = rp;
      s = {lambda, mu, r, rp};
      return a5_ratio(lambda, mu, r, rp);
    }
    case LemmaId::A8: {
      const double r = draw_radius(rng, plan.r_max);
      s = {lambda, mu, r, r};
      return a8_ratio(lambda, mu, r);
    }
    default:
      break;
  }
  throw DomainError("unhandled lemma");
}

}  // namespace detail

/// Samples `plan.count` parameter tuples for one lemma and reports the
/// supremum of its residual ratio. Every sample is a pure function of
/// (seed, lemma, index), so serial and parallel runs agree bit for bit and a
/// larger count only adds samples.
inline LemmaReport verify_lemma(LemmaId id, const EigenData& eig, const SamplePlan& plan,
                                unsigned threads = thread_count()) {
  plan.validate();
  // Box-drawn λ does not come from V∞, so only A7b (which uses R and Γ) and
  // eigenvalue-drawn scalar lemmas constrain the potential.
  const bool scalar_from_eig = !plan.lambda_box && !detail::uses_field(id);
  if (id == LemmaId::A7b || (scalar_from_eig && id != LemmaId::A1)) {
    const auto hyp = check_hypotheses(eig);
    if (detail::requires_h2(id) && !hyp.h2)
      throw HypothesisViolation(std::string(to_string(id)) + " requires hypothesis (H2)");
    if (detail::requires_h1(id) && !hyp.h1)
      throw HypothesisViolation(std::string(to_string(id)) + " requires hypothesis (H1)");
  }
  LemmaReport rep;
  rep.lemma = id;
  rep.ratios.assign(plan.count, 0.0);
  std::vector<LemmaSample> samples(plan.count);
  parallel_for(plan.count, [&](std::size_t i) {
    rep.ratios[i] = detail::sample_ratio(id, eig, plan, i, samples[i]);
  }, threads);

  bool finite = true;
  std::size_t worst = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rep.ratios.size(); ++i) {
    const double v = rep.ratios[i];
    if (!std::isfinite(v)) {
      if (finite) worst = i;
      finite = false;
      continue;
    }
    if (finite && v > best) {
      best = v;
      worst = i;
    }
  }
  rep.c_estimate = finite ? best : std::numeric_limits<double>::infinity();
  rep.worst_sample = samples[worst];
  rep.pass = finite && (!has_unit_bound(id) || rep.c_estimate <= 1.0 + kUnitBoundSlack);
  return rep;
}

/// Named potentials covering the hypothesis regimes exercised by the lemma
/// suite: d ∈ {1, 2, 3}; real-positive, complex-conjugate and near-cut
/// (arg = ±(π − 0.15)) spectra; normal and non-normal V∞. All satisfy (H2).
struct GridCase {
  std::string name;
  PotentialMatrix potential;
};

inline std::vector<GridCase> hypothesis_grid() {
  const double th = std::numbers::pi - 0.15;
  const cplx near_cut = std::polar(1.0, th);
  auto real_rotation = [](double a, double b) {
    MatrixXc m(2, 2);
    m << a, b, -b, a;  // eigenvalues a ± ib
    return m;
  };
  std::vector<GridCase> g;
  g.push_back({"d1-real-1", PotentialMatrix::diagonal({1.0})});
  g.push_back({"d1-real-4", PotentialMatrix::diagonal({4.0})});
  g.push_back({"d1-cut-plus", PotentialMatrix::diagonal({near_cut})});
  g.push_back({"d1-cut-minus", PotentialMatrix::diagonal({std::conj(near_cut)})});
  g.push_back({"d2-real-diag", PotentialMatrix::diagonal({1.0, 2.0})});
  g.push_back({"d2-conjugate-pair", PotentialMatrix(real_rotation(1.0, 2.0))});
  g.push_back({"d2-cut-pair", PotentialMatrix(real_rotation(near_cut.real(), near_cut.imag()))});
  {
    MatrixXc m(2, 2);
    m << 1.0, 5.0, 0.0, 2.0;
    g.push_back({"d2-nonnormal", PotentialMatrix(m)});
  }
  {
    MatrixXc m = MatrixXc::Zero(3, 3);
    m.topLeftCorner(2, 2) = real_rotation(3.0, 1.0);
    m(2, 2) = 0.5;
    g.push_back({"d3-pair-plus-real", PotentialMatrix(m)});
  }
  {
    MatrixXc m = MatrixXc::Zero(3, 3);
    m.topLeftCorner(2, 2) = real_rotation(2.0 * near_cut.real(), 2.0 * near_cut.imag());
    m(2, 2) = 3.0;
    g.push_back({"d3-cut-pair-plus-real", PotentialMatrix(m)});
  }
  {
    MatrixXc m(3, 3);
    m << 1.0, 2.0, 0.0, 0.0, cplx(2.0, 1.0), 1.0, 0.0, 0.0, 3.0;
    g.push_back({"d3-nonnormal", PotentialMatrix(m)});
  }
  {
    MatrixXc m(3, 3);
    m << cplx(2.0, 0.3), cplx(0.4, -0.2), cplx(-0.1, 0.5), cplx(0.3, 0.1), cplx(1.5, -0.8),
        cplx(0.2, 0.2), cplx(-0.5, 0.0), cplx(0.1, -0.3), cplx(2.5, 1.0);
    g.push_back({"d3-dense-complex", PotentialMatrix(m)});
  }
  return g;
}

}  // namespace raddich
