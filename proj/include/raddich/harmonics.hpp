#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "raddich/error.hpp"
#include "raddich/spectral.hpp"

namespace raddich {

/// Eigenvalue of −Δ on S^{n−1} for harmonic degree k: μ_k = k(k+n−2).
constexpr double laplace_eigenvalue(int k, int n) {
  return static_cast<double>(k) * static_cast<double>(k + n - 2);
}

/// Dimension of the space of degree-k spherical harmonics on S^{n−1}:
/// binomial(n+k−1, k) − binomial(n+k−3, k−2).
inline std::int64_t mode_multiplicity(int k, int n) {
  if (k < 0 || n < 2) throw DomainError("mode_multiplicity needs k >= 0, n >= 2");
  auto binom = [](std::int64_t top, std::int64_t bottom) -> std::int64_t {
    if (bottom < 0 || top < bottom) return 0;
    bottom = std::min(bottom, top - bottom);
    std::int64_t out = 1;
    for (std::int64_t i = 1; i <= bottom; ++i) {
      std::int64_t prod;
      if (__builtin_mul_overflow(out, top - bottom + i, &prod))
        throw DomainError("mode multiplicity overflows 64 bits");
      out = prod / i;
    }
    return out;
  };
  return binom(n + k - 1, k) - binom(n + k - 3, k - 2);
}

/// Sphere S^{n−1} truncated at harmonic degree K.
struct SphereSpec {
  int n = 3;
  int K = 0;

  void validate() const {
    if (n < 2) throw DomainError("sphere ambient dimension n must be >= 2");
    if (K < 0) throw DomainError("truncation degree K must be >= 0");
  }
  friend bool operator==(const SphereSpec&, const SphereSpec&) = default;
};

enum class Basis { canonical, eigen };

inline const char* to_string(Basis b) {
  return b == Basis::canonical ? "canonical" : "eigen";
}

/// Per-degree bookkeeping: μ_k, multiplicity and the offset of the (k, 0, 0)
/// coefficient in a flat array with fiber dimension d.
class ModeTable {
 public:
  struct Degree {
    int k;
    double mu;
    std::int64_t multiplicity;
    std::size_t offset;
  };

  ModeTable() = default;
  ModeTable(SphereSpec spec, int d) : spec_(spec), d_(d) {
    spec.validate();
    if (d < 1) throw DomainError("fiber dimension d must be >= 1");
    std::size_t offset = 0;
    for (int k = 0; k <= spec.K; ++k) {
      auto mult = mode_multiplicity(k, spec.n);
      degrees_.push_back({k, laplace_eigenvalue(k, spec.n), mult, offset});
      offset += static_cast<std::size_t>(mult) * static_cast<std::size_t>(d);
      if (offset > (std::size_t{1} << 28))
        throw DomainError("truncated field too large (more than 2^28 coefficients)");
    }
    size_ = offset;
  }

  const SphereSpec& spec() const noexcept { return spec_; }
  int d() const noexcept { return d_; }
  std::size_t size() const noexcept { return size_; }
  const std::vector<Degree>& degrees() const noexcept { return degrees_; }
  const Degree& degree(int k) const { return degrees_.at(static_cast<std::size_t>(k)); }

  std::size_t index(int k, std::int64_t j, int l) const {
    const auto& deg = degree(k);
    if (j < 0 || j >= deg.multiplicity || l < 0 || l >= d_)
      throw DomainError("mode index out of range");
    return deg.offset + static_cast<std::size_t>(j) * static_cast<std::size_t>(d_) +
           static_cast<std::size_t>(l);
  }

 private:
  SphereSpec spec_;
  int d_ = 1;
  std::size_t size_ = 0;
  std::vector<Degree> degrees_;
};

/// Truncated coefficient array u_{kjℓ} of a ℂᵈ-valued function on S^{n−1}.
///
/// Indices are zero-based: 0 ≤ k ≤ K, 0 ≤ j < N(k,n), 0 ≤ ℓ < d. In the
/// canonical basis ℓ indexes the components of u_{kj} ∈ ℂᵈ; in the eigen basis
/// it indexes (R⁻¹u_{kj})_ℓ. Immutable once built.
class SpectralField {
 public:
  SpectralField() = default;
  SpectralField(SphereSpec spec, int d, Basis basis)
      : table_(spec, d), basis_(basis), coeffs_(table_.size(), cplx{}) {}
  SpectralField(SphereSpec spec, int d, Basis basis, std::vector<cplx> coeffs)
      : table_(spec, d), basis_(basis), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != table_.size())
      throw DomainError("coefficient count " + std::to_string(coeffs_.size()) +
                        " does not match mode table size " +
                        std::to_string(table_.size()));
    for (cplx c : coeffs_)
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw DomainError("spectral field has non-finite coefficients");
  }

  template <typename F>
  static SpectralField from_function(SphereSpec spec, int d, Basis basis, F&& f) {
    ModeTable table(spec, d);
    std::vector<cplx> c(table.size());
    for (const auto& deg : table.degrees())
      for (std::int64_t j = 0; j < deg.multiplicity; ++j)
        for (int l = 0; l < d; ++l) c[table.index(deg.k, j, l)] = f(deg.k, j, l);
    return SpectralField(spec, d, basis, std::move(c));
  }

  const SphereSpec& spec() const noexcept { return table_.spec(); }
  int d() const noexcept { return table_.d(); }
  Basis basis() const noexcept { return basis_; }
  const ModeTable& table() const noexcept { return table_; }
  const std::vector<cplx>& coeffs() const noexcept { return coeffs_; }

  cplx at(int k, std::int64_t j, int l) const { return coeffs_[table_.index(k, j, l)]; }
  /// The ℂᵈ block u_{kj}.
  std::span<const cplx> block(int k, std::int64_t j) const {
    return {coeffs_.data() + table_.index(k, j, 0), static_cast<std::size_t>(d())};
  }

  friend bool operator==(const SpectralField& a, const SpectralField& b) {
    return a.spec() == b.spec() && a.d() == b.d() && a.basis_ == b.basis_ &&
           a.coeffs_ == b.coeffs_;
  }

 private:
  ModeTable table_;
  Basis basis_ = Basis::canonical;
  std::vector<cplx> coeffs_;
};

namespace detail {

inline Eigen::Map<const VectorXc> as_vector(std::span<const cplx> s) {
  return {s.data(), static_cast<Eigen::Index>(s.size())};
}

// Applies M to every block u_{kj}; M may depend on the degree.
template <typename BlockMap>
SpectralField map_blocks(const SpectralField& u, Basis out_basis, BlockMap&& map) {
  std::vector<cplx> out(u.coeffs().size());
  const int d = u.d();
  for (const auto& deg : u.table().degrees()) {
    for (std::int64_t j = 0; j < deg.multiplicity; ++j) {
      VectorXc v = map(deg, as_vector(u.block(deg.k, j)));
      std::size_t base = u.table().index(deg.k, j, 0);
      for (int l = 0; l < d; ++l) out[base + static_cast<std::size_t>(l)] = v(l);
    }
  }
  return SpectralField(u.spec(), d, out_basis, std::move(out));
}

inline void require_dims(const SpectralField& u, const EigenData& eig) {
  if (u.d() != eig.dim())
    throw DomainError("field fiber dimension does not match potential dimension");
}

}  // namespace detail

inline SpectralField to_eigen_basis(const SpectralField& u, const EigenData& eig) {
  if (u.basis() == Basis::eigen) return u;
  detail::require_dims(u, eig);
  return detail::map_blocks(u, Basis::eigen, [&](const auto&, const auto& v) {
    return VectorXc(eig.R_inv * v);
  });
}

inline SpectralField to_canonical_basis(const SpectralField& u, const EigenData& eig) {
  if (u.basis() == Basis::canonical) return u;
  detail::require_dims(u, eig);
  return detail::map_blocks(u, Basis::canonical, [&](const auto&, const auto& v) {
    return VectorXc(eig.R * v);
  });
}

enum class NormKind { L2, H1, H1Scaled };

/// L2 = (Σ‖u_{kj}‖²)^{1/2}, H1 = (Σ(1+μ_k)‖u_{kj}‖²)^{1/2}, H1Scaled(r) = H1/r.
/// The field must be in the canonical basis.
inline double norm(const SpectralField& u, NormKind kind, double r = 1.0) {
  if (u.basis() != Basis::canonical)
    throw BasisMismatch("norms are defined on canonical-basis coefficients");
  if (kind == NormKind::H1Scaled && !(r > 0.0)) throw DomainError("radius must be > 0");
  double acc = 0.0;
  for (const auto& deg : u.table().degrees()) {
    const double w = kind == NormKind::L2 ? 1.0 : 1.0 + deg.mu;
    double s = 0.0;
    for (std::int64_t j = 0; j < deg.multiplicity; ++j)
      for (cplx c : u.block(deg.k, j)) s += std::norm(c);
    acc += w * s;
  }
  const double out = std::sqrt(acc);
  return kind == NormKind::H1Scaled ? out / r : out;
}

/// Σ_{k,j} μ_k‖u_{kj}‖², the angular-gradient part of the H¹ norm.
inline double mu_weighted_sum(const SpectralField& u) {
  if (u.basis() != Basis::canonical)
    throw BasisMismatch("mu_weighted_sum needs canonical-basis coefficients");
  double acc = 0.0;
  for (const auto& deg : u.table().degrees()) {
    double s = 0.0;
    for (std::int64_t j = 0; j < deg.multiplicity; ++j)
      for (cplx c : u.block(deg.k, j)) s += std::norm(c);
    acc += deg.mu * s;
  }
  return acc;
}

}  // namespace raddich
