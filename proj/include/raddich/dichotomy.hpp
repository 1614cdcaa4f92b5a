#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "raddich/error.hpp"
#include "raddich/harmonics.hpp"
#include "raddich/parallel.hpp"
#include "raddich/riccati.hpp"
#include "raddich/spectral.hpp"
#include "raddich/symbols.hpp"

namespace raddich {

struct DichotomyOptions {
  RiccatiOptions riccati;
  /// Inner radius anchoring the unstable slopes.
  double r_min = 1.0;
};

namespace detail {

inline void require_h2(const EigenData& eig, const char* what) {
  if (!check_hypotheses(eig).h2)
    throw HypothesisViolation(std::string(what) + " requires hypothesis (H2)");
}

inline std::vector<double> sorted_radii(std::initializer_list<double> rs) {
  std::vector<double> out(rs);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace detail

/// exp(−∫_{r_from}^{r_to} m): decay of the stable solution from r_from out to
/// r_to ≥ r_from.
inline cplx stable_factor(cplx lambda, double mu, double r_from, double r_to,
                          const RiccatiOptions& opt = {}) {
  if (!(r_to >= r_from)) throw DomainError("stable propagation needs r_to >= r_from");
  if (r_to == r_from) return 1.0;
  auto slope = riccati_slope(lambda, mu, {r_from, r_to}, std::nullopt, opt);
  return std::exp(-slope.integral_between(r_from, r_to));
}

/// exp(−∫_{r_to}^{r_from} m̃): decay of the growing solution followed inward
/// from r_from to r_to ≤ r_from.
inline cplx unstable_factor(cplx lambda, double mu, double r_from, double r_to,
                            const DichotomyOptions& opt = {}) {
  if (!(r_to <= r_from)) throw DomainError("unstable propagation needs r_to <= r_from");
  if (r_to == r_from) return 1.0;
  const double anchor = std::min(opt.r_min, r_to);
  auto slope = unstable_riccati_slope(lambda, mu, detail::sorted_radii({r_to, r_from}),
                                      anchor, opt.riccati);
  return std::exp(-slope.integral_between(r_to, r_from));
}

namespace detail {

template <typename FactorFn>
SpectralField propagate_field(const SpectralField& field, const EigenData& eig,
                              FactorFn&& factor) {
  if (field.basis() != Basis::eigen)
    throw BasisMismatch("propagation acts on eigen-basis coefficients");
  require_dims(field, eig);
  const int d = eig.dim();
  const auto& degrees = field.table().degrees();
  std::vector<cplx> factors(degrees.size() * static_cast<std::size_t>(d));
  parallel_for(factors.size(), [&](std::size_t i) {
    const auto& deg = degrees[i / static_cast<std::size_t>(d)];
    const auto l = static_cast<std::size_t>(i % static_cast<std::size_t>(d));
    factors[i] = factor(eig.lambdas[l], deg.mu);
  });
  std::vector<cplx> out(field.coeffs());
  for (std::size_t kd = 0; kd < degrees.size(); ++kd) {
    const auto& deg = degrees[kd];
    for (std::int64_t j = 0; j < deg.multiplicity; ++j)
      for (int l = 0; l < d; ++l)
        out[field.table().index(deg.k, j, l)] *=
            factors[kd * static_cast<std::size_t>(d) + static_cast<std::size_t>(l)];
  }
  return SpectralField(field.spec(), d, Basis::eigen, std::move(out));
}

}  // namespace detail

/// Evolves eigen-basis coefficients along the stable subspace from r_from out
/// to r_to ≥ r_from: u_{kjℓ} ↦ exp(−∫ m_{kℓ}) u_{kjℓ}.
inline SpectralField stable_propagate(const SpectralField& field, const EigenData& eig,
                                      double r_from, double r_to,
                                      const DichotomyOptions& opt = {}) {
  detail::require_h2(eig, "stable_propagate");
  return detail::propagate_field(field, eig, [&](cplx lambda, double mu) {
    return stable_factor(lambda, mu, r_from, r_to, opt.riccati);
  });
}

/// Evolves eigen-basis coefficients along the unstable subspace from r_from in
/// to r_to ≤ r_from (a contraction going inward).
inline SpectralField unstable_propagate(const SpectralField& field, const EigenData& eig,
                                        double r_from, double r_to,
                                        const DichotomyOptions& opt = {}) {
  detail::require_h2(eig, "unstable_propagate");
  return detail::propagate_field(field, eig, [&](cplx lambda, double mu) {
    return unstable_factor(lambda, mu, r_from, r_to, opt);
  });
}

/// Restricted evolution operator in (u, u′) coordinates, one 2×2 block per
/// (k, ℓ) in the eigen basis.
struct ModePropagator {
  int k = 0;
  int l = 0;
  double mu = 0.0;
  Eigen::Matrix2cd T;
};

struct Propagator {
  double r_from = 1.0;
  double r_to = 1.0;
  SlopeKind kind = SlopeKind::stable;
  std::vector<ModePropagator> modes;

  /// 2d×2d block acting on (U, U′) ∈ ℂᵈ×ℂᵈ in canonical coordinates for
  /// harmonic degree k.
  MatrixXc canonical_block(const EigenData& eig, int k) const {
    const int d = eig.dim();
    MatrixXc block = MatrixXc::Zero(2 * d, 2 * d);
    for (const auto& m : modes) {
      if (m.k != k) continue;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) block(a * d + m.l, b * d + m.l) = m.T(a, b);
    }
    MatrixXc Rb = MatrixXc::Zero(2 * d, 2 * d), Rib = MatrixXc::Zero(2 * d, 2 * d);
    Rb.topLeftCorner(d, d) = eig.R;
    Rb.bottomRightCorner(d, d) = eig.R;
    Rib.topLeftCorner(d, d) = eig.R_inv;
    Rib.bottomRightCorner(d, d) = eig.R_inv;
    return Rb * block * Rib;
  }
};

/// Builds T^s(r_to ← r_from) (kind = stable, r_to ≥ r_from) or T^u (kind =
/// unstable, r_to ≤ r_from) for every degree k ≤ spec.K.
///
/// With s(r) = (1, −m(r)) spanning the stable line and w(r) = (1, m̃(r)) the
/// unstable one, T^s = f_s·s(r_to)·(m̃, −1)/(m + m̃)|_{r_from} and
/// T^u = f_u·w(r_to)·(m, 1)/(m + m̃)|_{r_from}.
inline Propagator make_propagator(const EigenData& eig, SphereSpec spec, double r_from,
                                  double r_to, SlopeKind kind,
                                  const DichotomyOptions& opt = {}) {
  detail::require_h2(eig, "make_propagator");
  spec.validate();
  if (kind == SlopeKind::stable ? r_to < r_from : r_to > r_from)
    throw DomainError("propagator direction does not match its kind");
  const int d = eig.dim();
  const auto radii = detail::sorted_radii({r_from, r_to});
  const double anchor = std::min(opt.r_min, radii.front());
  Propagator P{r_from, r_to, kind, {}};
  P.modes.resize(static_cast<std::size_t>(spec.K + 1) * static_cast<std::size_t>(d));
  parallel_for(P.modes.size(), [&](std::size_t i) {
    const int k = static_cast<int>(i / static_cast<std::size_t>(d));
    const int l = static_cast<int>(i % static_cast<std::size_t>(d));
    const double mu = laplace_eigenvalue(k, spec.n);
    const cplx lambda = eig.lambdas[static_cast<std::size_t>(l)];
    auto s = riccati_slope(lambda, mu, radii, std::nullopt, opt.riccati);
    auto w = unstable_riccati_slope(lambda, mu, radii, anchor, opt.riccati);
    const cplx m_from = s.m[s.locate(r_from)], mt_from = w.m[w.locate(r_from)];
    const cplx denom = m_from + mt_from;
    Eigen::Matrix2cd T;
    if (kind == SlopeKind::stable) {
      const cplx f = r_to == r_from ? cplx(1.0) : std::exp(-s.integral_between(r_from, r_to));
      const cplx m_to = s.m[s.locate(r_to)];
      Eigen::Vector2cd col(1.0, -m_to);
      Eigen::RowVector2cd row(mt_from, -1.0);
      T = (f / denom) * col * row;
    } else {
      const cplx f = r_to == r_from ? cplx(1.0) : std::exp(-w.integral_between(r_to, r_from));
      const cplx mt_to = w.m[w.locate(r_to)];
      Eigen::Vector2cd col(1.0, mt_to);
      Eigen::RowVector2cd row(m_from, 1.0);
      T = (f / denom) * col * row;
    }
    P.modes[i] = {k, l, mu, T};
  });
  return P;
}

/// later ∘ earlier, mode by mode. Requires matching mode sets and
/// earlier.r_to == later.r_from.
inline Propagator compose(const Propagator& later, const Propagator& earlier) {
  if (later.modes.size() != earlier.modes.size() || later.kind != earlier.kind ||
      later.r_from != earlier.r_to)
    throw DomainError("propagators are not composable");
  Propagator out{earlier.r_from, later.r_to, later.kind, later.modes};
  for (std::size_t i = 0; i < out.modes.size(); ++i)
    out.modes[i].T = later.modes[i].T * earlier.modes[i].T;
  return out;
}

/// Dichotomy projection P^s(r) on (U, U′) ∈ ℂ^{2d} for degree symbol μ: onto
/// span{(ρ_ℓ, −m_ℓρ_ℓ)} along span{(ρ_ℓ, m̃_ℓρ_ℓ)}.
inline MatrixXc projection(const EigenData& eig, double mu, double r,
                           const DichotomyOptions& opt = {}) {
  detail::require_h2(eig, "projection");
  const int d = eig.dim();
  const double anchor = std::min(opt.r_min, r);
  VectorXc m(d), mt(d);
  for (int l = 0; l < d; ++l) {
    const cplx lambda = eig.lambdas[static_cast<std::size_t>(l)];
    m(l) = riccati_slope(lambda, mu, {r}, std::nullopt, opt.riccati).m[0];
    mt(l) = unstable_riccati_slope(lambda, mu, {r}, anchor, opt.riccati).m[0];
  }
  MatrixXc S(2 * d, 2 * d);
  S.topLeftCorner(d, d) = eig.R;
  S.topRightCorner(d, d) = eig.R;
  S.bottomLeftCorner(d, d) = -eig.R * m.asDiagonal();
  S.bottomRightCorner(d, d) = eig.R * mt.asDiagonal();

  // Smallest principal angle between the two ranges.
  auto orthonormal = [&](const MatrixXc& A) {
    Eigen::HouseholderQR<MatrixXc> qr(A);
    return MatrixXc(qr.householderQ() * MatrixXc::Identity(2 * d, d));
  };
  MatrixXc Qs = orthonormal(S.leftCols(d)), Qu = orthonormal(S.rightCols(d));
  MatrixXc resid = Qu - Qs * (Qs.adjoint() * Qu);
  Eigen::JacobiSVD<MatrixXc> svd(resid);
  const double sin_min = svd.singularValues()(d - 1);
  if (!(std::asin(std::min(1.0, sin_min)) >= 1e-6))
    throw IllConditionedSplit("stable and unstable subspaces are within 1e-6 rad");

  MatrixXc D = MatrixXc::Zero(2 * d, 2 * d);
  D.topLeftCorner(d, d).setIdentity();
  return S * D * S.partialPivLu().inverse();
}

/// Fitted constants in ‖T^s(r₁, r₂)‖ ≤ K e^{−η(r₁−r₂)}.
struct DecayFit {
  double K = 1.0;
  double eta = 0.0;
  double rate_floor = 0.0;  // min_ℓ Re√λ_ℓ
  bool meets_floor = false; // eta ≥ rate_floor − 0.01
  std::vector<std::pair<double, double>> pairs;
  std::vector<double> norms;
};

/// Measures ‖T^s(r₁, r₂)‖ (the largest |exp(−∫_{r₂}^{r₁} m_{kℓ})| over the
/// given degree symbols μ and all ℓ, i.e. the operator norm on eigen-basis
/// coefficients) on each pair (r₁ ≥ r₂) and fits log‖T^s‖ against r₁ − r₂ by
/// least squares. K is then the smallest constant ≥ 1 satisfying the bound
/// on every pair.
inline DecayFit measure_decay(const EigenData& eig, std::span<const double> mus,
                              const std::vector<std::pair<double, double>>& pairs,
                              const DichotomyOptions& opt = {}) {
  detail::require_h2(eig, "measure_decay");
  if (pairs.size() < 10) throw FitFailure("decay fit needs at least 10 radius pairs");
  if (mus.empty()) throw FitFailure("decay fit needs a nonempty mode set");
  std::vector<double> radii;
  for (auto [r1, r2] : pairs) {
    if (!(r1 >= r2) || !(r2 >= 1.0)) throw FitFailure("pairs must satisfy r1 >= r2 >= 1");
    radii.push_back(r1);
    radii.push_back(r2);
  }
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());

  const int d = eig.dim();
  const std::size_t nmodes = mus.size() * static_cast<std::size_t>(d);
  std::vector<RiccatiSlope> slopes(nmodes);
  parallel_for(nmodes, [&](std::size_t i) {
    slopes[i] = riccati_slope(eig.lambdas[i % static_cast<std::size_t>(d)],
                              mus[i / static_cast<std::size_t>(d)], radii, std::nullopt,
                              opt.riccati);
  });

  DecayFit fit;
  fit.pairs = pairs;
  fit.rate_floor = std::numeric_limits<double>::infinity();
  for (cplx l : eig.lambdas)
    fit.rate_floor = std::min(fit.rate_floor, gamma_real_lower_bound(l));
  std::vector<double> x, y;
  for (auto [r1, r2] : pairs) {
    double best = 0.0;
    for (const auto& s : slopes)
      best = std::max(best, std::exp(-s.integral_between(r2, r1).real()));
    fit.norms.push_back(best);
    x.push_back(r1 - r2);
    y.push_back(std::log(best));
  }
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 1e-12 * n)) throw FitFailure("radius pairs have degenerate separations");
  fit.eta = -sxy / sxx;
  double K = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) K = std::max(K, std::exp(y[i] + fit.eta * x[i]));
  fit.K = K;
  fit.meets_floor = fit.eta >= fit.rate_floor - 0.01;
  return fit;
}

/// Default pair set for decay measurements: base radii {1, 2, 5} with
/// separations from 0.1 to 10.
inline std::vector<std::pair<double, double>> default_decay_pairs() {
  std::vector<std::pair<double, double>> out;
  for (double base : {1.0, 2.0, 5.0})
    for (double sep : {0.1, 0.25, 0.5, 1.0, 2.0, 3.0, 5.0, 7.5, 10.0})
      out.emplace_back(base + sep, base);
  return out;
}

/// Norm-equivalence ratios on one field at radius r:
///   a = (‖u‖²_{H¹}/r²) / ((1 + ‖V∞‖)‖u‖²_{L²} + ‖A(r)^{1/2}u‖²)
///   b = ‖u‖²_{L²} / ((‖R‖²‖R⁻¹‖²/Γ²)‖A(r)^{1/2}u‖²), only under (H2).
/// Both vanish on the zero field.
struct IsoRatios {
  double a = 0.0;
  std::optional<double> b;
};

inline IsoRatios iso_check(const SpectralField& field, const EigenData& eig, double r) {
  const SpectralField u = to_canonical_basis(field, eig);
  const double h1 = norm(u, NormKind::H1), l2 = norm(u, NormKind::L2);
  const double g = graph_norm(u, eig, r);
  IsoRatios out;
  const double denom_a = (1.0 + eig.potential_norm) * l2 * l2 + g * g;
  out.a = denom_a == 0.0 ? 0.0 : (h1 * h1 / (r * r)) / denom_a;
  const auto rep = check_hypotheses(eig);
  if (rep.h2) {
    const double c = eig.norm_R * eig.norm_R * eig.norm_R_inv * eig.norm_R_inv /
                     (rep.gamma_lower * rep.gamma_lower);
    const double denom_b = c * g * g;
    out.b = denom_b == 0.0 ? 0.0 : (l2 * l2) / denom_b;
  }
  return out;
}

}  // namespace raddich
