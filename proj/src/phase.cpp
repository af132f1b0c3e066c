#include "tqsb/phase.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "tqsb/error.hpp"
#include "tqsb/parallel.hpp"

namespace tqsb {

namespace {

ModelParams base_params(double alpha, double delta, double k_ising, double s) {
  ModelParams p;
  p.alpha = alpha;
  p.delta = delta;
  p.k_ising = k_ising;
  p.s = s;
  return validate(p);
}

double criterion_at(double alpha, double delta, double k_ising, double s,
                    const SolverOpts& opts) {
  const ModelParams p = base_params(alpha, delta, k_ising, s);
  return criterion(p, SpectralEvaluator(continuum_bath(p), opts.quad), opts);
}

struct Bisection {
  double pos = 0.0;  // criterion > 0 here
  double neg = 0.0;  // criterion <= 0 here
  int evaluations = 0;
};

// Shrinks [pos, neg] (in either order) until |pos - neg| <= width or the two
// ends are adjacent doubles.
Bisection bisect(const std::function<double(double)>& fn, double pos,
                 double neg, double width) {
  Bisection b{pos, neg, 0};
  for (;;) {
    if (std::abs(b.pos - b.neg) <= width) break;
    const double mid = 0.5 * (b.pos + b.neg);
    if (mid == b.pos || mid == b.neg) break;
    ++b.evaluations;
    if (fn(mid) > 0.0) {
      b.pos = mid;
    } else {
      b.neg = mid;
    }
  }
  return b;
}

}  // namespace

Criterion evaluate_criterion(const ModelParams& params,
                             const SpectralEvaluator& bath,
                             const SolverOpts& opts) {
  ModelParams unbiased = params;
  unbiased.epsilon = 0.0;
  Criterion c;
  AnsatzState st;
  try {
    st = solve_without_static_shift(unbiased, bath, opts);
  } catch (const Error& e) {
    if (e.code() != Errc::NotConverged) throw;
    c.value = -1.0;
    c.sigma_cap = 0.0;
    c.root_found = false;
    return c;
  }
  c.sigma_cap = st.sigma_cap;
  c.value = 1.0 - 4.0 * st.u * st.u * st.f_stat / st.gap;
  return c;
}

double criterion(const ModelParams& params, const SpectralEvaluator& bath,
                 const SolverOpts& opts) {
  return evaluate_criterion(params, bath, opts).value;
}

double criterion(const ModelParams& params, const SolverOpts& opts) {
  return criterion(params, SpectralEvaluator(continuum_bath(params), opts.quad),
                   opts);
}

CriticalPoint find_alpha_c(double delta, double k_ising, double s,
                           const CriticalSearchOpts& opts) {
  if (!(opts.lo >= 0.0 && opts.hi > opts.lo)) {
    throw Error(Errc::InvalidParameter, "alpha bracket must satisfy 0 <= lo < hi");
  }
  auto fn = [&](double a) { return criterion_at(a, delta, k_ising, s, opts.solver); };

  const double f_lo = fn(opts.lo);
  const double f_hi = fn(opts.hi);
  CriticalPoint cp;
  if (!(f_lo > 0.0) || f_hi > 0.0) {
    // Beyond the antiferromagnetic asymptote the boundary follows K_r = 0.
    const double asymptote = s * k_ising;
    if (f_lo > 0.0 && k_ising > 0.0 && asymptote >= opts.hi) {
      cp.alpha_c = asymptote;
      cp.bracket = {opts.hi, asymptote};
      cp.criterion_residual = f_hi;
      cp.asymptotic = true;
      cp.evaluations = 2;
      return cp;
    }
    throw Error(Errc::NoSignChange,
                "criterion does not change sign for alpha in [" +
                    std::to_string(opts.lo) + ", " + std::to_string(opts.hi) + "]");
  }
  const Bisection b = bisect(fn, opts.lo, opts.hi, opts.width);
  cp.bracket = {b.pos, b.neg};
  cp.alpha_c = 0.5 * (b.pos + b.neg);
  cp.criterion_residual = fn(cp.alpha_c);
  cp.evaluations = b.evaluations + 3;
  return cp;
}

AxisRoot find_delta_c(double alpha, double k_ising, double s,
                      const CriticalSearchOpts& opts) {
  const CriticalSearchOpts defaults;
  const bool custom = opts.lo != defaults.lo || opts.hi != defaults.hi;
  const double lo = custom ? opts.lo : 1e-9;
  const double hi = custom ? opts.hi : 10.0;
  auto fn = [&](double d) { return criterion_at(alpha, d, k_ising, s, opts.solver); };
  if (fn(lo) > 0.0 || !(fn(hi) > 0.0)) {
    throw Error(Errc::NoSignChange, "criterion does not change sign in Delta");
  }
  const Bisection b = bisect(fn, hi, lo, opts.width);
  AxisRoot r;
  r.bracket = {b.neg, b.pos};
  r.value = 0.5 * (b.pos + b.neg);
  r.criterion_residual = fn(r.value);
  r.evaluations = b.evaluations + 3;
  return r;
}

AxisRoot find_k_c(double alpha, double delta, double s,
                  const CriticalSearchOpts& opts) {
  auto fn = [&](double k) { return criterion_at(alpha, delta, k, s, opts.solver); };
  double lo = -1.0;
  double hi = 1.0;
  int evals = 0;
  for (int widen = 0; widen < 8 && fn(lo) > 0.0; ++widen, ++evals) lo *= 2.0;
  for (int widen = 0; widen < 8 && !(fn(hi) > 0.0); ++widen, ++evals) hi *= 2.0;
  if (fn(lo) > 0.0 || !(fn(hi) > 0.0)) {
    throw Error(Errc::NoSignChange, "criterion does not change sign in K");
  }
  const Bisection b = bisect(fn, hi, lo, opts.width);
  AxisRoot r;
  r.bracket = {b.neg, b.pos};
  r.value = 0.5 * (b.pos + b.neg);
  r.criterion_residual = fn(r.value);
  r.evaluations = b.evaluations + evals + 3;
  return r;
}

ScalingLimit alpha_c_scaling_limit(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw Error(Errc::InvalidExponent, "s must be positive");
  }
  if (s > 1.0) return {std::numeric_limits<double>::infinity(), true};
  if (s == 1.0) return {0.125, false};
  return {0.0, false};
}

std::vector<BoundaryRow> scan_boundary(ScanAxis axis,
                                       const std::vector<double>& grid,
                                       const ModelParams& fixed,
                                       const std::vector<double>& s_list,
                                       const CriticalSearchOpts& opts) {
  if (!std::is_sorted(grid.begin(), grid.end())) {
    throw Error(Errc::InvalidParameter, "scan grid must be sorted");
  }
  auto rows_for_s = [&](std::size_t si) {
    const double s = s_list[si];
    std::vector<BoundaryRow> rows;
    rows.reserve(grid.size());
    std::optional<double> previous;
    for (const double x : grid) {
      BoundaryRow row;
      row.s = s;
      row.axis_value = x;
      const double delta = axis == ScanAxis::Delta ? x : fixed.delta;
      const double k = axis == ScanAxis::K ? x : fixed.k_ising;
      if (axis == ScanAxis::K) row.asymptote_alpha = s * k / fixed.omega_c;
      try {
        std::optional<CriticalPoint> cp;
        if (previous) {
          // Warm start: a narrow bracket around the last root, kept only if
          // it still straddles the transition.
          CriticalSearchOpts narrow = opts;
          narrow.lo = std::max(opts.lo, 0.5 * *previous);
          narrow.hi = std::min(opts.hi, 2.0 * *previous);
          try {
            if (narrow.hi > narrow.lo) cp = find_alpha_c(delta, k, s, narrow);
            if (cp && cp->asymptotic) cp.reset();
          } catch (const Error& e) {
            if (e.code() != Errc::NoSignChange) throw;
          }
        }
        if (!cp) cp = find_alpha_c(delta, k, s, opts);
        row.alpha_c = cp->alpha_c;
        row.residual = cp->criterion_residual;
        row.asymptotic = cp->asymptotic;
        if (!cp->asymptotic) previous = cp->alpha_c;
      } catch (const Error& e) {
        row.error = e.what();
      }
      rows.push_back(std::move(row));
    }
    return rows;
  };

  const auto per_s =
      parallel_map<std::vector<BoundaryRow>>(s_list.size(), rows_for_s);
  std::vector<BoundaryRow> out;
  for (const auto& rows : per_s) out.insert(out.end(), rows.begin(), rows.end());
  return out;
}

ExponentFit fit_exponent(const std::vector<double>& xs,
                         const std::vector<double>& ys,
                         const FitWindow& window) {
  if (xs.size() != ys.size()) {
    throw Error(Errc::InvalidParameter, "x and y sizes differ");
  }
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) {
      throw Error(Errc::NonPositiveData,
                  "log-log fit needs positive data (point " + std::to_string(i) + ")");
    }
    if (!(xs[i] >= window.min && xs[i] <= window.max)) continue;
    lx.push_back(std::log10(xs[i]));
    ly.push_back(std::log10(ys[i]));
  }
  const std::size_t n = lx.size();
  if (n < 10) {
    throw Error(Errc::InsufficientPoints,
                std::to_string(n) + " points in window, need 10");
  }

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = lx[i] - mx;
    const double dy = ly[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) {
    throw Error(Errc::InsufficientPoints, "all abscissae coincide");
  }

  ExponentFit fit;
  fit.slope = sxy / sxx;
  fit.value = fit.slope;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  const auto [mn, mxit] = std::minmax_element(lx.begin(), lx.end());
  fit.window = {*mn, *mxit};
  fit.n_points = static_cast<int>(n);
  return fit;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0 && hi > lo) || n < 2) {
    throw Error(Errc::InvalidParameter, "log grid needs 0 < lo < hi and n >= 2");
  }
  std::vector<double> out(static_cast<std::size_t>(n));
  const double a = std::log(lo);
  const double step = (std::log(hi) - a) / (n - 1);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + step * i);
  out.front() = lo;
  out.back() = hi;
  return out;
}

namespace {

CriticalSearchOpts tight_search(const ExponentOpts& opts) {
  CriticalSearchOpts cs;
  cs.width = 0.0;
  cs.solver.quad = opts.quad;
  return cs;
}

double sz_at(const ModelParams& p, const SolverOpts& so) {
  const SolveReport r = solve(p, SpectralEvaluator(continuum_bath(p), so.quad), so);
  return 0.5 * r.state.sigma0;
}

ExponentSeries sample(const std::vector<double>& ts,
                      const std::function<double(double)>& fn) {
  ExponentSeries out;
  out.x = ts;
  out.y = parallel_map<double>(ts.size(), [&](std::size_t i) { return fn(ts[i]); });
  return out;
}

ExponentFit fit_series(const ExponentSeries& s) { return fit_exponent(s.x, s.y); }

}  // namespace

ExponentFit beta_exponent(double s, double delta, double k_ising,
                          const ExponentOpts& opts, ExponentSeries* series) {
  const CriticalSearchOpts cs = tight_search(opts);
  const double alpha_c = find_alpha_c(delta, k_ising, s, cs).alpha_c;
  const auto ts = log_grid(opts.t_min, opts.t_max, opts.n_points);
  ExponentSeries data = sample(ts, [&](double t) {
    return sz_at(base_params(alpha_c * (1.0 + t), delta, k_ising, s), cs.solver);
  });
  for (double& x : data.x) x *= alpha_c;
  ExponentFit fit = fit_series(data);
  if (series) *series = std::move(data);
  return fit;
}

ExponentSuite exponent_suite(double s, double delta, double k_ising,
                             const ExponentOpts& opts) {
  const CriticalSearchOpts cs = tight_search(opts);
  const SolverOpts& so = cs.solver;
  ExponentSuite out;
  out.s = s;
  out.delta = delta;
  out.k_ising = k_ising;
  out.alpha_c = find_alpha_c(delta, k_ising, s, cs).alpha_c;
  const double ac = out.alpha_c;
  const auto ts = log_grid(opts.t_min, opts.t_max, opts.n_points);

  // Critical isotherm: <sz> against eps at alpha_c.
  out.delta_series = sample(log_grid(opts.eps_min, opts.eps_max, opts.n_points),
                            [&](double eps) {
                              ModelParams p = base_params(ac, delta, k_ising, s);
                              p.epsilon = eps;
                              return sz_at(p, so);
                            });
  out.delta_exp = fit_series(out.delta_series);
  out.delta_exp.value = 1.0 / out.delta_exp.slope;

  // Susceptibility from the delocalized side, closed form at eps = 0.
  out.gamma_series = sample(ts, [&](double t) {
    const ModelParams p = base_params(ac * (1.0 - t), delta, k_ising, s);
    const AnsatzState st =
        solve_without_static_shift(p, SpectralEvaluator(continuum_bath(p), so.quad), so);
    const double h = st.sigma_cap - 4.0 * st.u * st.u * st.f_stat;
    if (!(h > 0.0)) {
      throw Error(Errc::NotInDelocalizedPhase, "susceptibility sample beyond alpha_c");
    }
    return 2.0 * st.u * st.u / h;
  });
  for (double& x : out.gamma_series.x) x *= ac;
  out.gamma = fit_series(out.gamma_series);
  out.gamma.value = -out.gamma.slope;

  out.beta = beta_exponent(s, delta, k_ising, opts, &out.beta_series);

  // Tunneling axis at alpha = alpha_c.
  out.delta_c = find_delta_c(ac, k_ising, s, cs).value;
  out.beta_prime_series = sample(ts, [&](double t) {
    return sz_at(base_params(ac, out.delta_c * (1.0 - t), k_ising, s), so);
  });
  for (double& x : out.beta_prime_series.x) x *= out.delta_c;
  out.beta_prime = fit_series(out.beta_prime_series);

  // Ising axis, slightly above the K = 0 critical coupling.
  out.alpha_zeta = opts.zeta_alpha_factor * ac;
  out.k_c = find_k_c(out.alpha_zeta, delta, s, cs).value;
  const double k_scale = std::abs(out.k_c);
  out.zeta_series = sample(ts, [&](double t) {
    return sz_at(base_params(out.alpha_zeta, delta, out.k_c - t * k_scale, s), so);
  });
  for (double& x : out.zeta_series.x) x *= k_scale;
  out.zeta = fit_series(out.zeta_series);
  return out;
}

}  // namespace tqsb
