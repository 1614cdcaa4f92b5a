#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <string>
#include <type_traits>
#include <vector>

#include "raddich/error.hpp"

namespace raddich {

template <typename T>
struct QuadratureResult {
  T value{};
  double error = 0.0;
  int intervals = 0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the nodes at odd positions of kKronrodNodes, plus center.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename T>
struct Panel {
  double a, b;
  T value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <typename T>
double magnitude(const T& v) {
  return std::abs(v);
}

template <typename F, typename T = std::invoke_result_t<F, double>>
Panel<T> kronrod_panel(F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  T fc = f(c);
  T kron = fc * kKronrodWeights[7];
  T gauss = fc * kGaussWeights[3];
  for (int i = 0; i < 7; ++i) {
    const double x = h * kKronrodNodes[static_cast<std::size_t>(i)];
    T s = f(c - x) + f(c + x);
    kron += s * kKronrodWeights[static_cast<std::size_t>(i)];
    if (i % 2 == 1) gauss += s * kGaussWeights[static_cast<std::size_t>(i / 2)];
  }
  kron *= h;
  gauss *= h;
  return {a, b, kron, magnitude(kron - gauss)};
}

}  // namespace detail

/// Globally adaptive Gauss–Kronrod (7/15) quadrature with bisection of the
/// panel carrying the largest error estimate. The accepted error is
/// max(abs_tol, 50·ε·|I|): the roundoff level of the rule itself.
template <typename F, typename T = std::invoke_result_t<F, double>>
QuadratureResult<T> integrate_adaptive(F&& f, double a, double b, double abs_tol,
                                       int max_intervals = 4000) {
  if (a == b) return {T{}, 0.0, 0};
  std::priority_queue<detail::Panel<T>> panels;
  auto first = detail::kronrod_panel(f, a, b);
  T total = first.value;
  double err = first.error;
  panels.push(first);
  int count = 1;
  auto accepted = [&] {
    return err <= std::max(abs_tol, 50.0 * std::numeric_limits<double>::epsilon() *
                                        detail::magnitude(total));
  };
  while (!accepted()) {
    if (count >= max_intervals)
      throw QuadratureFailure("adaptive quadrature exhausted " +
                              std::to_string(max_intervals) + " panels, error " +
                              std::to_string(err));
    auto worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    auto left = detail::kronrod_panel(f, worst.a, mid);
    auto right = detail::kronrod_panel(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++count;
  }
  // Re-sum from the panels so the value does not carry the update drift.
  T sum{};
  double esum = 0.0;
  std::vector<detail::Panel<T>> all;
  while (!panels.empty()) {
    all.push_back(panels.top());
    panels.pop();
  }
  std::sort(all.begin(), all.end(),
            [](const auto& x, const auto& y) { return x.a < y.a; });
  for (const auto& p : all) {
    sum += p.value;
    esum += p.error;
  }
  return {sum, esum, count};
}

}  // namespace raddich
