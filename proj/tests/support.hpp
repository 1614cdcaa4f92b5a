#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "raddich/random.hpp"
#include "raddich/spectral.hpp"

namespace testsupport {

using raddich::cplx;

// Decaying radial solution u(r) = √r K_ν(r) of u″ = (1 + μ/r²)u, ν = √(μ + 1/4).
inline double bessel_nu(double mu) { return std::sqrt(mu + 0.25); }

inline double bessel_u(double mu, double r) {
  return std::sqrt(r) * std::cyl_bessel_k(bessel_nu(mu), r);
}

// −u′/u with K′_ν = −(K_{ν−1} + K_{ν+1})/2.
inline double bessel_slope(double mu, double r) {
  const double nu = bessel_nu(mu);
  const double k = std::cyl_bessel_k(nu, r);
  const double dk = -0.5 * (std::cyl_bessel_k(nu - 1.0, r) + std::cyl_bessel_k(nu + 1.0, r));
  return -(0.5 / r + dk / k);
}

// Eigenvalue off the closed negative axis with |arg| ≤ π − margin.
inline cplx random_wedge_eigenvalue(raddich::CounterRng& rng, double margin = 0.3) {
  const double mod = rng.log_uniform(0.3, 4.0);
  if (rng.uniform() < 0.3) return mod;
  const double arg = rng.uniform(-(std::numbers::pi - margin), std::numbers::pi - margin);
  return std::polar(mod, arg);
}

// V = R Λ R⁻¹ with R a perturbation of the identity: satisfies (H2).
inline raddich::PotentialMatrix random_h2_potential(raddich::CounterRng& rng, int d) {
  raddich::MatrixXc R = raddich::MatrixXc::Identity(d, d);
  raddich::MatrixXc L = raddich::MatrixXc::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    L(i, i) = random_wedge_eigenvalue(rng);
    for (int j = 0; j < d; ++j) R(i, j) += 0.3 * rng.complex_normal();
  }
  return raddich::PotentialMatrix(raddich::MatrixXc(R * L * R.inverse()));
}

}  // namespace testsupport
