#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "raddich/error.hpp"
#include "raddich/spectral.hpp"
#include "raddich/symbols.hpp"

namespace raddich {

struct RiccatiOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  std::size_t max_steps = 1'000'000;
  double blowup = 1e8;
  /// Target size of the far-field seeding error after backward damping.
  double seed_tol = 1e-12;
};

enum class SlopeKind { stable, unstable };

/// Logarithmic slope of the decaying (stable) or growing (unstable) solution
/// of u″ = (λ + μ/r²)u on a grid of radii.
///
/// stable:   u′ = −m u, m′ = m² − γ², seeded m(anchor) = γ(anchor) at the
///           outer horizon and integrated inward. `integral[i]` holds
///           ∫_{r_i}^{anchor} m.
/// unstable: u′ = m̃ u, m̃′ = γ² − m̃², seeded m̃(anchor) = γ(anchor) at the
///           inner radius and integrated outward. `integral[i]` holds
///           ∫_{anchor}^{r_i} m̃.
struct RiccatiSlope {
  cplx lambda;
  double mu = 0.0;
  SlopeKind kind = SlopeKind::stable;
  double anchor = 1.0;
  std::vector<double> r_grid;  // strictly increasing
  std::vector<cplx> m;
  std::vector<cplx> integral;
  std::size_t steps = 0;

  std::size_t locate(double r) const {
    auto it = std::lower_bound(r_grid.begin(), r_grid.end(), r);
    if (it == r_grid.end() || *it != r)
      throw DomainError("radius " + std::to_string(r) + " is not on the slope grid");
    return static_cast<std::size_t>(it - r_grid.begin());
  }

  /// ∫_{a}^{b} of the slope for grid radii a ≤ b.
  cplx integral_between(double a, double b) const {
    const std::size_t i = locate(a), j = locate(b);
    return kind == SlopeKind::stable ? integral[i] - integral[j]
                                     : integral[j] - integral[i];
  }
};

namespace detail {

// Three-stage Radau IIA, order 5, stiffly accurate.
struct RadauTableau {
  std::array<double, 3> c;
  std::array<std::array<double, 3>, 3> a;
};

inline const RadauTableau& radau_tableau() {
  static const RadauTableau t = [] {
    const double s6 = std::sqrt(6.0);
    RadauTableau r;
    r.c = {(4.0 - s6) / 10.0, (4.0 + s6) / 10.0, 1.0};
    r.a = {{{(88.0 - 7.0 * s6) / 360.0, (296.0 - 169.0 * s6) / 1800.0,
             (-2.0 + 3.0 * s6) / 225.0},
            {(296.0 + 169.0 * s6) / 1800.0, (88.0 + 7.0 * s6) / 360.0,
             (-2.0 - 3.0 * s6) / 225.0},
            {(16.0 - s6) / 36.0, (16.0 + s6) / 36.0, 1.0 / 9.0}}};
    return r;
  }();
  return t;
}

struct StepResult {
  bool converged = false;
  cplx y;
  cplx dJ;
};

// One Radau step for y′ = λ + μ/τ² − y², J′ = y, solved by Newton on the
// stage increments.
inline StepResult radau_step(cplx lambda, double mu, double tau, cplx y, double h) {
  const auto& t = radau_tableau();
  auto F = [&](double s, cplx v) { return lambda + mu / (s * s) - v * v; };
  std::array<cplx, 3> Z;
  const cplx f0 = F(tau, y);
  for (int i = 0; i < 3; ++i) Z[static_cast<std::size_t>(i)] = t.c[static_cast<std::size_t>(i)] * h * f0;
  const double scale = std::max(1.0, std::abs(y));
  bool converged = false;
  for (int iter = 0; iter < 16 && !converged; ++iter) {
    Eigen::Matrix3cd J;
    Eigen::Vector3cd G;
    std::array<cplx, 3> f;
    for (std::size_t j = 0; j < 3; ++j) f[j] = F(tau + t.c[j] * h, y + Z[j]);
    for (std::size_t i = 0; i < 3; ++i) {
      cplx gi = Z[i];
      for (std::size_t j = 0; j < 3; ++j) {
        gi -= h * t.a[i][j] * f[j];
        J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            (i == j ? 1.0 : 0.0) + 2.0 * h * t.a[i][j] * (y + Z[j]);
      }
      G(static_cast<Eigen::Index>(i)) = gi;
    }
    Eigen::Vector3cd dZ = J.partialPivLu().solve(-G);
    double step = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      Z[i] += dZ(static_cast<Eigen::Index>(i));
      step = std::max(step, std::abs(dZ(static_cast<Eigen::Index>(i))));
    }
    if (!std::isfinite(step)) return {};
    converged = step <= 1e-15 * scale;
    if (!converged && step <= 1e-13 * scale && iter >= 3) converged = true;
  }
  if (!converged) return {};
  // b equals the last row of A.
  cplx dJ = 0.0;
  for (std::size_t j = 0; j < 3; ++j) dJ += h * t.a[2][j] * (y + Z[j]);
  return {true, y + Z[2], dJ};
}

// Integrates from (tau0, y0, J = 0) through the increasing targets and
// records (y, J) at each. Step size control by step doubling.
inline std::size_t integrate_riccati(cplx lambda, double mu, double tau0, cplx y0,
                                     const std::vector<double>& targets,
                                     const RiccatiOptions& opt,
                                     std::vector<cplx>& y_out,
                                     std::vector<cplx>& J_out) {
  y_out.assign(targets.size(), {});
  J_out.assign(targets.size(), {});
  double tau = tau0;
  cplx y = y0, J = 0.0;
  const double span = targets.empty() ? 0.0 : targets.back() - tau0;
  double h = std::min(std::max(span, 1e-3) * 1e-2, 0.1 / std::max(1.0, std::abs(y0)));
  std::size_t steps = 0;
  for (std::size_t ti = 0; ti < targets.size(); ++ti) {
    const double target = targets[ti];
    while (tau < target) {
      if (++steps > opt.max_steps)
        throw BlowUp("Riccati integration exceeded the step budget");
      bool last = false;
      double hs = h;
      if (tau + hs >= target || target - (tau + hs) < 1e-12 * std::abs(target)) {
        hs = target - tau;
        last = true;
      }
      auto full = radau_step(lambda, mu, tau, y, hs);
      auto half1 = radau_step(lambda, mu, tau, y, 0.5 * hs);
      StepResult half2;
      if (half1.converged) half2 = radau_step(lambda, mu, tau + 0.5 * hs, half1.y, 0.5 * hs);
      if (!full.converged || !half1.converged || !half2.converged) {
        h = 0.25 * hs;
        if (h < 1e-14 * std::max(1.0, std::abs(tau)))
          throw BlowUp("Riccati step size underflow (Newton failure)");
        continue;
      }
      const cplx y2 = half2.y, dJ2 = half1.dJ + half2.dJ;
      const double ey = std::abs(y2 - full.y) / (opt.atol + opt.rtol * std::abs(y2));
      const double eJ = std::abs(dJ2 - full.dJ) / (opt.atol + opt.rtol * std::abs(dJ2));
      const double err = std::max(ey, eJ) / 31.0;
      const double factor =
          err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -1.0 / 6.0), 0.2, 5.0);
      if (err <= 1.0) {
        tau = last ? target : tau + hs;
        y = y2;
        J += dJ2;
        if (!std::isfinite(std::abs(y)) || std::abs(y) > opt.blowup)
          throw BlowUp("Riccati slope exceeded " + std::to_string(opt.blowup) +
                       " (wrong branch or hypothesis failure)");
        // Keep the controller's step when the last step was clipped short.
        h = last ? std::max(h, hs * factor) : hs * factor;
      } else {
        h = hs * factor;
      }
    }
    y_out[ti] = y;
    J_out[ti] = J;
  }
  return steps;
}

inline void check_grid(const std::vector<double>& r_grid) {
  if (r_grid.empty()) throw DomainError("slope grid must be nonempty");
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    if (!(r_grid[i] >= 1.0) || !std::isfinite(r_grid[i]))
      throw DomainError("slope grid radii must be finite and >= 1");
    if (i > 0 && !(r_grid[i] > r_grid[i - 1]))
      throw DomainError("slope grid must be strictly increasing");
  }
}

inline double seed_error(cplx lambda, double mu, double R) {
  const cplx g = gamma(lambda, mu, R);
  return mu / (2.0 * R * R * R * std::norm(g));
}

}  // namespace detail

/// Default outer horizon for the stable slope: r_top + max(20, 10√μ/√|λ|),
/// lengthened if needed so the frozen-coefficient seeding error, damped by
/// exp(−2 Re√λ (R − r_top)), falls below `seed_tol`.
inline double default_horizon(cplx lambda, double mu, double r_top,
                              double seed_tol = RiccatiOptions{}.seed_tol) {
  double R = r_top + std::max(20.0, 10.0 * std::sqrt(mu) / std::sqrt(std::abs(lambda)));
  const double rate = 2.0 * gamma_real_lower_bound(lambda);
  const double e = detail::seed_error(lambda, mu, R);
  if (e > seed_tol) R = std::max(R, r_top + std::log(e / seed_tol) / rate);
  return R;
}

/// Stable slope m on `r_grid`, integrated inward from the horizon `r_max`.
inline RiccatiSlope riccati_slope(cplx lambda, double mu, std::vector<double> r_grid,
                                  std::optional<double> r_max = std::nullopt,
                                  const RiccatiOptions& opt = {}) {
  detail::check_grid(r_grid);
  gamma_real_lower_bound(lambda);
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw DomainError("mu must be finite and >= 0");
  const double top = r_grid.back();
  const double R = r_max.value_or(default_horizon(lambda, mu, top, opt.seed_tol));
  if (!(R >= top)) throw HorizonTooShort("horizon lies inside the requested grid");
  const double damping = std::exp(-2.0 * gamma_real_lower_bound(lambda) * (R - top));
  if (detail::seed_error(lambda, mu, R) * damping > opt.seed_tol)
    throw HorizonTooShort("horizon " + std::to_string(R) +
                          " leaves a far-field seeding error above tolerance");

  std::vector<double> targets(r_grid.rbegin(), r_grid.rend());
  for (double& t : targets) t = -t;
  std::vector<cplx> y, J;
  RiccatiSlope out{lambda, mu, SlopeKind::stable, R, std::move(r_grid), {}, {}, 0};
  out.steps = detail::integrate_riccati(lambda, mu, -R, gamma(lambda, mu, R), targets,
                                        opt, y, J);
  out.m.assign(y.rbegin(), y.rend());
  out.integral.assign(J.rbegin(), J.rend());
  return out;
}

/// Unstable slope m̃ on `r_grid`, integrated outward from `r_min`.
inline RiccatiSlope unstable_riccati_slope(cplx lambda, double mu,
                                           std::vector<double> r_grid,
                                           double r_min = 1.0,
                                           const RiccatiOptions& opt = {}) {
  detail::check_grid(r_grid);
  gamma_real_lower_bound(lambda);
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw DomainError("mu must be finite and >= 0");
  if (!(r_min >= 1.0) || r_min > r_grid.front())
    throw DomainError("unstable slope anchor must satisfy 1 <= r_min <= min(grid)");
  std::vector<cplx> y, J;
  RiccatiSlope out{lambda, mu, SlopeKind::unstable, r_min, std::move(r_grid), {}, {}, 0};
  out.steps = detail::integrate_riccati(lambda, mu, r_min, gamma(lambda, mu, r_min),
                                        out.r_grid, opt, y, J);
  out.m = std::move(y);
  out.integral = std::move(J);
  return out;
}

}  // namespace raddich
