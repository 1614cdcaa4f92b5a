#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "raddich/error.hpp"
#include "raddich/harmonics.hpp"
#include "raddich/parallel.hpp"
#include "raddich/spectral.hpp"
#include "raddich/symbols.hpp"

namespace raddich {

/// (k, j, ℓ) tag of a radial profile; -1 marks an untagged single-mode solve.
struct ModeTag {
  int k = -1;
  std::int64_t j = -1;
  int l = -1;
};

struct RadialProfile {
  std::vector<double> r_grid;
  std::vector<cplx> values;
  ModeTag mode;
};

/// Piecewise-linear evaluation of a profile inside its grid.
inline cplx interpolate(const RadialProfile& p, double r) {
  const auto& g = p.r_grid;
  if (g.empty() || r < g.front() || r > g.back())
    throw DomainError("interpolation radius outside the profile grid");
  auto it = std::upper_bound(g.begin(), g.end(), r);
  if (it == g.end()) return p.values.back();
  const std::size_t i = static_cast<std::size_t>(it - g.begin());
  const double t = (r - g[i - 1]) / (g[i] - g[i - 1]);
  return (1.0 - t) * p.values[i - 1] + t * p.values[i];
}

/// Annulus boundary data in the eigen basis. Without `outer` the problem is
/// exterior: the solution is required to decay as r → ∞.
struct BoundaryData {
  double r0 = 1.0;
  double r1 = 2.0;
  SpectralField inner;
  std::optional<SpectralField> outer;
};

namespace detail {

// r(x) = r0 + L·(e^{βx} − 1)/(e^β − 1) on x ∈ [0, 1] (linear for β = 0),
// extendable past x = 1. Grading β = w·ln(r1/r0) with w = t/(1 + t),
// t = μ/r0², so steps near r0 shrink where μ/r² dominates the symbol.
struct GradedMap {
  double r0, r1, L, beta;

  static GradedMap for_mode(double mu, double r0, double r1) {
    const double t = mu / (r0 * r0);
    double beta = (t / (1.0 + t)) * std::log(r1 / r0);
    if (beta < 1e-8) beta = 0.0;
    return {r0, r1, r1 - r0, beta};
  }
  double scale() const { return beta == 0.0 ? L : L * beta / std::expm1(beta); }
  double r(double x) const {
    return beta == 0.0 ? r0 + L * x : r0 + L * std::expm1(beta * x) / std::expm1(beta);
  }
  double dr(double x) const { return beta == 0.0 ? L : scale() * std::exp(beta * x); }
  double x_of(double r) const {
    return beta == 0.0 ? (r - r0) / L
                       : std::log1p((r - r0) * std::expm1(beta) / L) / beta;
  }
};

// Numerov solve of u″ = (λ + μ/r²)u on nodes x_i = i/N, i = 0..M, of the map.
// With u = √(r′(x))·w the equation becomes w″ = Q(x)w, Q = r′²q + β²/4 (the
// Schwarzian term of the exponential map), which has no first-derivative term.
inline RadialProfile numerov_solve(cplx lambda, double mu, const GradedMap& map,
                                   std::size_t N, std::size_t M, cplx a, cplx b,
                                   std::size_t keep) {
  const double h = 1.0 / static_cast<double>(N);
  std::vector<double> x(M + 1), r(M + 1), sq(M + 1);
  std::vector<cplx> Q(M + 1);
  for (std::size_t i = 0; i <= M; ++i) {
    x[i] = static_cast<double>(i) * h;
    r[i] = i == 0 ? map.r0 : i == N ? map.r1 : map.r(x[i]);
    const double dr = map.dr(x[i]);
    sq[i] = std::sqrt(dr);
    Q[i] = dr * dr * (lambda + mu / (r[i] * r[i])) + 0.25 * map.beta * map.beta;
  }
  std::vector<cplx> w(M + 1, cplx{});
  w[0] = a / sq[0];
  w[M] = b / sq[M];
  const std::size_t n = M - 1;
  if (n > 0 && (a != cplx{} || b != cplx{})) {
    const double c = h * h / 12.0;
    Eigen::SparseMatrix<cplx> A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    std::vector<Eigen::Triplet<cplx>> trips;
    trips.reserve(3 * n);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t i = 1; i <= n; ++i) {
      const auto row = static_cast<Eigen::Index>(i - 1);
      trips.emplace_back(row, row, -(2.0 + 10.0 * c * Q[i]));
      const cplx lo = 1.0 - c * Q[i - 1], hi = 1.0 - c * Q[i + 1];
      if (i > 1) trips.emplace_back(row, row - 1, lo);
      else rhs(row) -= lo * w[0];
      if (i < n) trips.emplace_back(row, row + 1, hi);
      else rhs(row) -= hi * w[M];
    }
    A.setFromTriplets(trips.begin(), trips.end());
    Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw SingularSystem("Numerov system is singular");
    Eigen::VectorXcd sol = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !sol.allFinite())
      throw SingularSystem("Numerov system is numerically singular");
    for (std::size_t i = 1; i <= n; ++i) w[i] = sol(static_cast<Eigen::Index>(i - 1));
  }
  RadialProfile out;
  out.r_grid.assign(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(keep + 1));
  out.values.resize(keep + 1);
  for (std::size_t i = 0; i <= keep; ++i) out.values[i] = sq[i] * w[i];
  out.values[0] = a;
  if (keep == M) out.values[M] = b;
  return out;
}

inline void check_bvp_args(double r0, double r1, std::size_t N) {
  if (!(r0 >= 1.0) || !(r1 > r0) || !std::isfinite(r1))
    throw DomainError("boundary value problem needs 1 <= r0 < r1");
  if (N < 8) throw DomainError("grid size N must be >= 8");
}

}  // namespace detail

/// Two-point solve of u″ = (λ + μ/r²)u, u(r0) = a, u(r1) = b with N graded
/// intervals (compact fourth-order Numerov scheme).
inline RadialProfile solve_mode_bvp(cplx lambda, double mu, double r0, double r1, cplx a,
                                    cplx b, std::size_t N) {
  detail::check_bvp_args(r0, r1, N);
  if (!(mu >= 0.0)) throw DomainError("mu must be >= 0");
  auto map = detail::GradedMap::for_mode(mu, r0, r1);
  return detail::numerov_solve(lambda, mu, map, N, N, a, b, N);
}

/// Far-field truncation radius for exterior solves: r1 + max(20, 10/Re√λ).
inline double far_field_radius(double r1, double rate) {
  return r1 + std::max(20.0, 10.0 / rate);
}

/// Exterior solve: u(r0) = a and decay as r → ∞, imposed as u(R_far) = 0.
/// The graded map of [r0, r1] is continued past r1 so that r1 stays a node;
/// the returned profile covers [r0, r1].
inline RadialProfile solve_mode_exterior(cplx lambda, double mu, double r0, double r1,
                                         cplx a, std::size_t N,
                                         std::optional<double> R_far = std::nullopt) {
  detail::check_bvp_args(r0, r1, N);
  if (!(mu >= 0.0)) throw DomainError("mu must be >= 0");
  const double far = R_far.value_or(far_field_radius(r1, gamma_real_lower_bound(lambda)));
  if (!(far > r1)) throw DomainError("far-field radius must exceed r1");
  auto map = detail::GradedMap::for_mode(mu, r0, r1);
  const double x_far = map.x_of(far);
  const double nodes = std::ceil(x_far * static_cast<double>(N));
  if (!(nodes < static_cast<double>(std::size_t{1} << 22)))
    throw DomainError("exterior grid too large; increase r1 - r0 or lower N");
  const auto M = static_cast<std::size_t>(nodes);
  return detail::numerov_solve(lambda, mu, map, N, M, a, cplx{}, N);
}

/// Solves every (k, j, ℓ) mode of the boundary data. Profiles come back in
/// flat coefficient order (k, then j, then ℓ); all ℓ of one degree share a grid.
inline std::vector<RadialProfile> solve_annulus(const EigenData& eig,
                                                const BoundaryData& bc, std::size_t N) {
  if (bc.inner.basis() != Basis::eigen || (bc.outer && bc.outer->basis() != Basis::eigen))
    throw BasisMismatch("boundary data must be in the eigen basis");
  detail::require_dims(bc.inner, eig);
  if (bc.outer && (bc.outer->spec() != bc.inner.spec() || bc.outer->d() != bc.inner.d()))
    throw DomainError("inner and outer boundary fields are incompatible");
  detail::check_bvp_args(bc.r0, bc.r1, N);
  const int d = eig.dim();
  std::optional<double> far;
  if (!bc.outer) {
    double rate = std::numeric_limits<double>::infinity();
    for (cplx l : eig.lambdas) rate = std::min(rate, gamma_real_lower_bound(l));
    far = far_field_radius(bc.r1, rate);
  }

  const auto& degrees = bc.inner.table().degrees();
  const std::size_t nkl = degrees.size() * static_cast<std::size_t>(d);
  std::vector<RadialProfile> from_inner(nkl), from_outer(nkl);
  parallel_for(nkl, [&](std::size_t i) {
    const double mu = degrees[i / static_cast<std::size_t>(d)].mu;
    const cplx lambda = eig.lambdas[i % static_cast<std::size_t>(d)];
    if (bc.outer) {
      from_inner[i] = solve_mode_bvp(lambda, mu, bc.r0, bc.r1, 1.0, 0.0, N);
      from_outer[i] = solve_mode_bvp(lambda, mu, bc.r0, bc.r1, 0.0, 1.0, N);
    } else {
      from_inner[i] = solve_mode_exterior(lambda, mu, bc.r0, bc.r1, 1.0, N, far);
    }
  });

  std::vector<RadialProfile> out;
  out.reserve(bc.inner.coeffs().size());
  for (std::size_t kd = 0; kd < degrees.size(); ++kd) {
    const auto& deg = degrees[kd];
    for (std::int64_t j = 0; j < deg.multiplicity; ++j) {
      for (int l = 0; l < d; ++l) {
        const std::size_t i = kd * static_cast<std::size_t>(d) + static_cast<std::size_t>(l);
        const cplx a = bc.inner.at(deg.k, j, l);
        const cplx b = bc.outer ? bc.outer->at(deg.k, j, l) : cplx{};
        RadialProfile p;
        p.mode = {deg.k, j, l};
        p.r_grid = from_inner[i].r_grid;
        p.values.resize(p.r_grid.size());
        for (std::size_t n = 0; n < p.r_grid.size(); ++n) {
          cplx v = a * from_inner[i].values[n];
          if (bc.outer) v += b * from_outer[i].values[n];
          p.values[n] = v;
        }
        out.push_back(std::move(p));
      }
    }
  }
  return out;
}

namespace oracle {

/// Plain second-order central differences on a uniform grid of N_dense
/// intervals, with its own pivoted tridiagonal elimination. Shares no
/// discretization code with solve_mode_bvp.
inline RadialProfile fd_oracle(cplx lambda, double mu, double r0, double r1, cplx a,
                               cplx b, std::size_t N_dense) {
  if (!(r0 >= 1.0) || !(r1 > r0)) throw DomainError("fd_oracle needs 1 <= r0 < r1");
  if (N_dense < 8) throw DomainError("fd_oracle grid must have >= 8 intervals");
  const std::size_t N = N_dense, n = N - 1;
  const double h = (r1 - r0) / static_cast<double>(N);
  RadialProfile out;
  out.r_grid.resize(N + 1);
  for (std::size_t i = 0; i <= N; ++i)
    out.r_grid[i] = i == N ? r1 : r0 + h * static_cast<double>(i);
  // Row i (unknown u_{i+1}): u_i − (2 + h²q) u_{i+1} + u_{i+2} = 0.
  std::vector<cplx> dl(n, 1.0), dg(n), du(n, 1.0), rhs(n, cplx{});
  for (std::size_t i = 0; i < n; ++i) {
    const double r = out.r_grid[i + 1];
    dg[i] = -(2.0 + h * h * (lambda + mu / (r * r)));
  }
  rhs[0] -= a;
  rhs[n - 1] -= b;
  // dl[i] couples row i+1 to unknown i; du[i] couples row i to unknown i+1.
  auto singular = [] { throw SingularSystem("finite-difference oracle system is singular"); };
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(dg[i]) >= std::abs(dl[i])) {
      if (dg[i] == cplx{}) singular();
      const cplx f = dl[i] / dg[i];
      dg[i + 1] -= f * du[i];
      rhs[i + 1] -= f * rhs[i];
      dl[i] = 0.0;
    } else {
      const cplx f = dg[i] / dl[i];
      dg[i] = dl[i];
      const cplx t = dg[i + 1];
      dg[i + 1] = du[i] - f * t;
      if (i + 2 < n) {
        dl[i] = du[i + 1];
        du[i + 1] = -f * dl[i];
      } else {
        dl[i] = 0.0;
      }
      du[i] = t;
      const cplx tb = rhs[i];
      rhs[i] = rhs[i + 1];
      rhs[i + 1] = tb - f * rhs[i + 1];
    }
  }
  if (dg[n - 1] == cplx{}) singular();
  std::vector<cplx> u(n);
  u[n - 1] = rhs[n - 1] / dg[n - 1];
  if (n >= 2) u[n - 2] = (rhs[n - 2] - du[n - 2] * u[n - 1]) / dg[n - 2];
  for (std::size_t ii = n >= 2 ? n - 2 : 0; ii-- > 0;)
    u[ii] = (rhs[ii] - du[ii] * u[ii + 1] - dl[ii] * u[ii + 2]) / dg[ii];
  out.values.resize(N + 1);
  out.values[0] = a;
  out.values[N] = b;
  for (std::size_t i = 0; i < n; ++i) out.values[i + 1] = u[i];
  for (cplx v : out.values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) singular();
  return out;
}

}  // namespace oracle

using oracle::fd_oracle;

}  // namespace raddich
