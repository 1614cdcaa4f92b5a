#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "raddich/error.hpp"

namespace raddich {

using cplx = std::complex<double>;
using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

/// The asymptotic potential V∞: a square complex matrix with finite entries.
class PotentialMatrix {
 public:
  PotentialMatrix() = default;
  explicit PotentialMatrix(MatrixXc entries) : entries_(std::move(entries)) {
    if (entries_.rows() < 1 || entries_.rows() != entries_.cols())
      throw DomainError("potential matrix must be square with d >= 1");
    if (!entries_.allFinite())
      throw DomainError("potential matrix has non-finite entries");
  }

  static PotentialMatrix identity(int d) {
    return PotentialMatrix(MatrixXc::Identity(d, d));
  }
  static PotentialMatrix diagonal(const std::vector<cplx>& diag) {
    MatrixXc m = MatrixXc::Zero(static_cast<Eigen::Index>(diag.size()),
                                static_cast<Eigen::Index>(diag.size()));
    for (std::size_t i = 0; i < diag.size(); ++i)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = diag[i];
    return PotentialMatrix(std::move(m));
  }

  int dim() const noexcept { return static_cast<int>(entries_.rows()); }
  const MatrixXc& entries() const noexcept { return entries_; }
  /// Spectral norm ‖V∞‖₂.
  double norm() const {
    Eigen::JacobiSVD<MatrixXc> svd(entries_);
    return svd.singularValues()(0);
  }

  friend bool operator==(const PotentialMatrix& a, const PotentialMatrix& b) {
    return a.entries_.rows() == b.entries_.rows() && a.entries_ == b.entries_;
  }

 private:
  MatrixXc entries_;
};

/// Diagonalization V∞ = R·diag(λ)·R⁻¹.
///
/// Eigenvalues are sorted lexicographically by (Re, Im). Each column of R has
/// unit 2-norm and its first nonzero entry is real positive, so the result is
/// reproducible entry for entry.
struct EigenData {
  std::vector<cplx> lambdas;
  MatrixXc R;
  MatrixXc R_inv;
  double cond = 1.0;             // ‖R‖₂‖R⁻¹‖₂
  double norm_R = 1.0;           // ‖R‖₂
  double norm_R_inv = 1.0;       // ‖R⁻¹‖₂
  double potential_norm = 0.0;   // ‖V∞‖₂
  MatrixXc V;

  int dim() const noexcept { return static_cast<int>(lambdas.size()); }
};

/// Spectral hypotheses on V∞, as the estimates use them.
///
/// h1: no eigenvalue lies on the closed negative real axis (−∞, 0].
/// h2: h1, every real eigenvalue strictly positive, and V∞ diagonalizable.
/// gamma_lower: Γ = min_ℓ sqrt(|λ_ℓ^im|) if λ_ℓ^im ≠ 0, sqrt(|λ_ℓ^re|)
/// otherwise, so that |γ_{kℓ}(r)| ≥ Γ for every mode and radius. Zero unless
/// h2 holds.
struct HypothesisReport {
  bool h1 = false;
  bool h2 = false;
  bool diagonalizable = false;
  std::vector<cplx> offending_eigenvalues;
  double gamma_lower = 0.0;
};

namespace detail {

inline double spectral_scale(const MatrixXc& V) {
  return std::max(1.0, V.cwiseAbs().maxCoeff());
}

// Parts below this size relative to the matrix scale are rounding noise of
// the Schur iteration; zeroing them keeps the sort order and the hypothesis
// classification stable for matrices with real or imaginary spectra.
inline cplx snap(cplx z, double scale) {
  const double tol = 1e-13 * scale;
  return {std::abs(z.real()) <= tol ? 0.0 : z.real(),
          std::abs(z.imag()) <= tol ? 0.0 : z.imag()};
}

inline bool on_negative_axis(cplx z) {
  return z.imag() == 0.0 && z.real() <= 0.0;
}

inline std::vector<cplx> sorted_eigenvalues(const MatrixXc& V) {
  Eigen::ComplexEigenSolver<MatrixXc> es(V, false);
  const double scale = spectral_scale(V);
  std::vector<cplx> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    out.push_back(snap(es.eigenvalues()(i), scale));
  std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return out;
}

}  // namespace detail

inline constexpr double kDefaultConditionCap = 1e12;

inline EigenData eigendecompose(const PotentialMatrix& potential,
                                double cond_cap = kDefaultConditionCap) {
  const MatrixXc& V = potential.entries();
  const int d = potential.dim();
  Eigen::ComplexEigenSolver<MatrixXc> es(V, true);
  if (es.info() != Eigen::Success)
    throw NonDiagonalizable("complex Schur iteration did not converge");

  const double scale = detail::spectral_scale(V);
  std::vector<int> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::vector<cplx> raw(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i)
    raw[static_cast<std::size_t>(i)] = detail::snap(es.eigenvalues()(i), scale);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    cplx x = raw[static_cast<std::size_t>(a)], y = raw[static_cast<std::size_t>(b)];
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });

  EigenData eig;
  eig.V = V;
  eig.potential_norm = potential.norm();
  eig.R.resize(d, d);
  for (int c = 0; c < d; ++c) {
    const int src = order[static_cast<std::size_t>(c)];
    eig.lambdas.push_back(raw[static_cast<std::size_t>(src)]);
    VectorXc col = es.eigenvectors().col(src);
    const double nrm = col.norm();
    if (!(nrm > 0.0) || !std::isfinite(nrm))
      throw NonDiagonalizable("degenerate eigenvector");
    col /= nrm;
    for (int i = 0; i < d; ++i) {
      if (std::abs(col(i)) > 1e-12) {
        col *= std::conj(col(i)) / std::abs(col(i));
        col(i) = std::abs(col(i));
        break;
      }
    }
    eig.R.col(c) = col;
  }

  Eigen::JacobiSVD<MatrixXc> svd(eig.R);
  const auto& sv = svd.singularValues();
  const double smin = sv(d - 1);
  if (!(smin > 0.0) || sv(0) / smin > cond_cap)
    throw NonDiagonalizable("eigenvector matrix condition number exceeds cap " +
                            std::to_string(cond_cap));
  eig.R_inv = eig.R.partialPivLu().inverse();
  eig.norm_R = sv(0);
  eig.norm_R_inv = 1.0 / smin;
  eig.cond = eig.norm_R * eig.norm_R_inv;

  MatrixXc Lambda = MatrixXc::Zero(d, d);
  for (int i = 0; i < d; ++i) Lambda(i, i) = eig.lambdas[static_cast<std::size_t>(i)];
  const double vnorm = std::max(eig.potential_norm, 1e-300);
  const double resid = (V * eig.R - eig.R * Lambda).norm();
  if (resid > 1e-10 * std::max(vnorm, 1.0) * eig.cond)
    throw NonDiagonalizable("eigenpair residual too large: " + std::to_string(resid));
  return eig;
}

inline HypothesisReport check_hypotheses(const EigenData& eig) {
  HypothesisReport rep;
  rep.diagonalizable = true;
  double gmin = std::numeric_limits<double>::infinity();
  for (cplx l : eig.lambdas) {
    if (detail::on_negative_axis(l)) rep.offending_eigenvalues.push_back(l);
    double g = l.imag() != 0.0 ? std::abs(l.imag()) : std::abs(l.real());
    gmin = std::min(gmin, g);
  }
  rep.h1 = rep.offending_eigenvalues.empty();
  // Under h1 a real eigenvalue is already strictly positive.
  rep.h2 = rep.h1 && rep.diagonalizable;
  rep.gamma_lower = rep.h2 ? std::sqrt(gmin) : 0.0;
  return rep;
}

/// Report-style check straight from the matrix: a defective V∞ yields h2 =
/// false instead of an exception.
inline HypothesisReport check_hypotheses(const PotentialMatrix& potential,
                                         double cond_cap = kDefaultConditionCap) {
  try {
    return check_hypotheses(eigendecompose(potential, cond_cap));
  } catch (const NonDiagonalizable&) {
    HypothesisReport rep;
    for (cplx l : detail::sorted_eigenvalues(potential.entries()))
      if (detail::on_negative_axis(l)) rep.offending_eigenvalues.push_back(l);
    rep.h1 = rep.offending_eigenvalues.empty();
    return rep;
  }
}

}  // namespace raddich
