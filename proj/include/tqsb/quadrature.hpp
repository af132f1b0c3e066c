#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "tqsb/error.hpp"

namespace tqsb {

struct QuadratureOpts {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_subdivisions = 200;
};

/// Throws Errc::InvalidParameter unless both tolerances are positive and the
/// subdivision budget is at least one.
void validate(const QuadratureOpts& opts);

template <std::size_t N>
struct QuadResult {
  std::array<double, N> value{};
  std::array<double, N> error{};
  int subdivisions = 0;
};

namespace detail {

// Kronrod 15-point extension of the 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <std::size_t N>
struct Panel {
  double a = 0.0;
  double b = 0.0;
  std::array<double, N> value{};
  std::array<double, N> error{};
};

template <std::size_t N, class F>
Panel<N> kronrod15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<double, N> kron{};
  std::array<double, N> gauss{};

  const auto fc = f(center);
  for (std::size_t i = 0; i < N; ++i) {
    kron[i] = kWgk[7] * fc[i];
    gauss[i] = kWg[3] * fc[i];
  }
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const auto f1 = f(center - dx);
    const auto f2 = f(center + dx);
    for (std::size_t i = 0; i < N; ++i) {
      const double sum = f1[i] + f2[i];
      kron[i] += kWgk[j] * sum;
      if (j % 2 == 1) gauss[i] += kWg[j / 2] * sum;
    }
  }
  Panel<N> p;
  p.a = a;
  p.b = b;
  for (std::size_t i = 0; i < N; ++i) {
    p.value[i] = kron[i] * half;
    p.error[i] = std::abs((kron[i] - gauss[i]) * half);
  }
  return p;
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of a vector-valued integrand over
/// [a, b]. All components share one subdivision tree; the loop stops once
/// every component satisfies |err_i| <= max(abs_tol, rel_tol |I_i|).
template <std::size_t N, class F>
QuadResult<N> integrate(F&& f, double a, double b, const QuadratureOpts& opts,
                        int initial_panels = 1) {
  std::vector<detail::Panel<N>> panels;
  initial_panels = std::clamp(initial_panels, 1, opts.max_subdivisions);
  panels.reserve(static_cast<std::size_t>(opts.max_subdivisions) + 1);
  const double width = (b - a) / initial_panels;
  for (int k = 0; k < initial_panels; ++k) {
    const double lo = a + k * width;
    const double hi = (k + 1 == initial_panels) ? b : lo + width;
    panels.push_back(detail::kronrod15<N>(f, lo, hi));
  }

  auto totals = [&](std::array<double, N>& value, std::array<double, N>& error) {
    value.fill(0.0);
    error.fill(0.0);
    for (const auto& p : panels) {
      for (std::size_t i = 0; i < N; ++i) {
        value[i] += p.value[i];
        error[i] += p.error[i];
      }
    }
  };

  QuadResult<N> result;
  for (;;) {
    totals(result.value, result.error);
    std::array<double, N> tol{};
    bool done = true;
    for (std::size_t i = 0; i < N; ++i) {
      tol[i] = std::max(opts.abs_tol, opts.rel_tol * std::abs(result.value[i]));
      if (!(result.error[i] <= tol[i])) done = false;
    }
    result.subdivisions = static_cast<int>(panels.size());
    if (done) return result;
    if (static_cast<int>(panels.size()) >= opts.max_subdivisions) {
      throw Error(Errc::QuadratureNotConverged,
                  "tolerance not met within " +
                      std::to_string(opts.max_subdivisions) + " subdivisions");
    }

    // Split the panel that contributes most to the worst component.
    std::size_t worst = 0;
    double worst_score = -1.0;
    for (std::size_t k = 0; k < panels.size(); ++k) {
      double score = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        score = std::max(score, panels[k].error[i] / tol[i]);
      }
      if (score > worst_score) {
        worst_score = score;
        worst = k;
      }
    }
    const double lo = panels[worst].a;
    const double hi = panels[worst].b;
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) {
      throw Error(Errc::QuadratureNotConverged,
                  "panel width reached floating-point resolution");
    }
    panels[worst] = detail::kronrod15<N>(f, lo, mid);
    panels.push_back(detail::kronrod15<N>(f, mid, hi));
  }
}

}  // namespace tqsb
