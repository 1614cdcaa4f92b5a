#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "raddich/error.hpp"
#include "raddich/harmonics.hpp"
#include "raddich/quadrature.hpp"
#include "raddich/spectral.hpp"

namespace raddich {

namespace detail {

inline void check_symbol_args(double mu, double r) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw DomainError("mu must be finite and >= 0");
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("radius must be finite and > 0");
}

inline std::string format_cplx(cplx z) {
  return "(" + std::to_string(z.real()) + "," + std::to_string(z.imag()) + ")";
}

// Throws BranchCut when z lies on (−∞, 0] to relative tolerance 1e-14.
inline void check_branch(cplx z) {
  const double tol = 1e-14 * std::max(1.0, std::abs(z));
  if (std::abs(z.imag()) <= tol && z.real() <= tol)
    throw BranchCut("argument " + format_cplx(z) +
                    " lies on the principal branch cut (-inf, 0]");
}

}  // namespace detail

/// γ(r) = (λ + μ/r²)^{1/2} on the principal branch (Re γ > 0).
inline cplx gamma(cplx lambda, double mu, double r) {
  detail::check_symbol_args(mu, r);
  const cplx z = lambda + mu / (r * r);
  detail::check_branch(z);
  return std::sqrt(z);
}

/// ∂_r γ = −μ/(r³γ).
inline cplx dgamma(cplx lambda, double mu, double r) {
  const cplx g = gamma(lambda, mu, r);
  return -mu / (r * r * r * g);
}

/// Re(λ^{1/2}), a lower bound for Re γ(r) over all μ ≥ 0 and r ≥ 1.
inline double gamma_real_lower_bound(cplx lambda) {
  detail::check_branch(lambda);
  return std::sqrt(lambda).real();
}

inline constexpr double kGammaQuadTol = 1e-10;

/// ∫_{r_from}^{r_to} γ(s) ds by adaptive Gauss–Kronrod quadrature.
inline cplx integrate_gamma(cplx lambda, double mu, double r_from, double r_to,
                            double abs_tol = kGammaQuadTol) {
  if (!(r_from >= 1.0) || !(r_to >= r_from))
    throw DomainError("integrate_gamma needs 1 <= r_from <= r_to");
  // λ + μ/s² moves monotonically between its endpoint values, so checking
  // both ends covers the whole segment.
  gamma(lambda, mu, r_from);
  gamma(lambda, mu, r_to);
  auto f = [&](double s) { return std::sqrt(lambda + mu / (s * s)); };
  return integrate_adaptive(f, r_from, r_to, abs_tol).value;
}

/// A(r)^{1/2} on one harmonic degree: R·diag(γ_1(r), …, γ_d(r))·R⁻¹·v.
inline VectorXc sqrt_A_apply(const EigenData& eig, double mu, double r,
                             const Eigen::Ref<const VectorXc>& v) {
  if (v.size() != eig.dim()) throw DomainError("vector length does not match d");
  VectorXc w = eig.R_inv * v;
  for (int l = 0; l < eig.dim(); ++l)
    w(l) *= gamma(eig.lambdas[static_cast<std::size_t>(l)], mu, r);
  return eig.R * w;
}

/// ‖A(r)^{1/2}u‖_{L²} = (Σ_{k,j}‖A_k(r)^{1/2}u_{kj}‖²)^{1/2}, in either basis.
inline double graph_norm(const SpectralField& u, const EigenData& eig, double r) {
  if (!(r >= 1.0)) throw DomainError("graph_norm needs r >= 1");
  detail::require_dims(u, eig);
  const int d = eig.dim();
  double acc = 0.0;
  VectorXc g(d);
  for (const auto& deg : u.table().degrees()) {
    for (int l = 0; l < d; ++l)
      g(l) = gamma(eig.lambdas[static_cast<std::size_t>(l)], deg.mu, r);
    for (std::int64_t j = 0; j < deg.multiplicity; ++j) {
      auto v = detail::as_vector(u.block(deg.k, j));
      VectorXc w = u.basis() == Basis::canonical ? VectorXc(eig.R_inv * v) : VectorXc(v);
      acc += (eig.R * g.cwiseProduct(w)).squaredNorm();
    }
  }
  return std::sqrt(acc);
}

/// γ and ∂_rγ for one (λ, μ) pair over a strictly increasing grid of radii.
struct SymbolSample {
  cplx lambda;
  double mu = 0.0;
  std::vector<double> r_grid;
  std::vector<cplx> gamma;
  std::vector<cplx> dgamma;
};

inline SymbolSample sample_symbol(cplx lambda, double mu, std::vector<double> r_grid) {
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    if (!(r_grid[i] >= 1.0)) throw DomainError("symbol grid radii must be >= 1");
    if (i > 0 && !(r_grid[i] > r_grid[i - 1]))
      throw DomainError("symbol grid must be strictly increasing");
  }
  SymbolSample s{lambda, mu, std::move(r_grid), {}, {}};
  s.gamma.resize(s.r_grid.size());
  s.dgamma.resize(s.r_grid.size());
  for (std::size_t i = 0; i < s.r_grid.size(); ++i) {
    s.gamma[i] = gamma(lambda, mu, s.r_grid[i]);
    s.dgamma[i] = -mu / (s.r_grid[i] * s.r_grid[i] * s.r_grid[i] * s.gamma[i]);
  }
  return s;
}

}  // namespace raddich
