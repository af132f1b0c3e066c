#include "tqsb/solver.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "tqsb/error.hpp"

namespace tqsb {

UVW uvw(double eta, double v_ind, double k_ising, double delta) {
  const double ed = eta * delta;
  const double vk = v_ind - k_ising;
  UVW out;
  out.w = std::hypot(ed, vk);
  if (!(out.w > 0.0)) {
    throw Error(Errc::DegenerateGap, "W vanished (eta * Delta = 0 and V = K)");
  }
  // The small one of u^2, v^2 is written as ed^2 / (2 W (W + |V-K|)).
  const double small = ed * ed / (2.0 * out.w * (out.w + std::abs(vk)));
  if (vk >= 0.0) {
    out.u = std::sqrt(1.0 - small);
    out.v = std::sqrt(small);
    out.gap = ed * ed / (out.w + vk);
  } else {
    out.u = std::sqrt(small);
    out.v = std::sqrt(1.0 - small);
    out.gap = out.w - vk;
  }
  return out;
}

ThetaSigma theta_sigma_from_gap(double gap, double eps_prime, double u) {
  const double mix = 2.0 * eps_prime * u;
  ThetaSigma out;
  out.sigma_cap = std::hypot(gap, mix);
  if (!(out.sigma_cap >= 1e-300)) {
    throw Error(Errc::DegenerateGap, "Sigma underflowed");
  }
  const double sgn = (eps_prime < 0.0) ? -1.0 : 1.0;
  const double sc = out.sigma_cap;
  if (gap >= 0.0) {
    out.cos_theta = std::sqrt((sc + gap) / (2.0 * sc));
    out.sin_theta = sgn * std::abs(mix) / std::sqrt(2.0 * sc * (sc + gap));
  } else {
    out.sin_theta = sgn * std::sqrt((sc - gap) / (2.0 * sc));
    out.cos_theta = std::abs(mix) / std::sqrt(2.0 * sc * (sc - gap));
  }
  return out;
}

ThetaSigma theta_sigma(double w, double v_ind, double k_ising, double eps_prime,
                       double u) {
  return theta_sigma_from_gap(w - v_ind + k_ising, eps_prime, u);
}

std::string_view to_string(Branch b) noexcept {
  return b == Branch::Localized ? "Localized" : "Delocalized";
}

void validate(const SolverOpts& opts) {
  if (opts.max_iter < 1) {
    throw Error(Errc::InvalidParameter, "max_iter must be >= 1");
  }
  if (!(opts.fp_tol > 0.0)) {
    throw Error(Errc::InvalidParameter, "fp_tol must be positive");
  }
  if (!(opts.damping > 0.0 && opts.damping <= 1.0)) {
    throw Error(Errc::InvalidParameter, "damping must lie in (0, 1]");
  }
  if (!(opts.sigma_floor > 0.0)) {
    throw Error(Errc::InvalidParameter, "sigma_floor must be positive");
  }
  validate(opts.quad);
}

namespace {

struct Probe {
  double sigma = 0.0;
  BathFunctionals f;
  UVW b;
  double h = 0.0;  // Sigma - 4 u^2 F; sigma0 = 4 u^2 eps / h needs h > 0
};

Probe probe(const SpectralEvaluator& ev, const ModelParams& p, double sigma) {
  Probe pr;
  pr.sigma = sigma;
  pr.f = ev(sigma);
  pr.b = uvw(pr.f.eta, pr.f.v_ind, p.k_ising, p.delta);
  pr.h = sigma - 4.0 * pr.b.u * pr.b.u * pr.f.f_stat;
  return pr;
}

enum class Closure { Full, Pinned };

struct Root {
  double sigma = 0.0;
  bool on_h_boundary = false;
};

// Negative above the largest admissible Sigma, non-negative at or below it.
double closure_value(const Probe& pr, const ModelParams& p, Closure mode) {
  const double g = pr.b.gap / pr.sigma;
  const double eu = 2.0 * pr.b.u * p.epsilon / pr.sigma;
  if (mode == Closure::Pinned) return g * g + eu * eu - 1.0;
  if (p.epsilon == 0.0) return g - 1.0;
  // (gap^2 - Sigma^2) h^2 + 4 u^2 eps^2 Sigma^2, scaled by Sigma^-4; zero
  // exactly where Sigma^2 = gap^2 + 4 u^2 eps'^2 with eps' = eps Sigma / h.
  const double hs = pr.h / pr.sigma;
  return (g * g - 1.0) * hs * hs + eu * eu;
}

Root largest_root(const ModelParams& p, const SpectralEvaluator& ev,
                  const SolverOpts& opts, Closure mode, int& evals) {
  auto blocked = [&](const Probe& pr) {
    return mode == Closure::Full && pr.h <= 0.0;
  };
  auto at = [&](double y) {
    ++evals;
    return probe(ev, p, std::exp(y));
  };

  double y_hi = std::log(10.0);
  Probe hi = at(y_hi);
  while (closure_value(hi, p, mode) >= 0.0 || blocked(hi)) {
    y_hi += std::log(10.0);
    if (y_hi > std::log(1e12)) {
      throw Error(Errc::NotConverged, "no upper bracket for Sigma");
    }
    hi = at(y_hi);
  }

  const double y_floor = std::log(opts.sigma_floor);
  constexpr double kStep = 0.5;
  double y_lo = y_hi - kStep;
  Probe lo = at(y_lo);
  while (closure_value(lo, p, mode) < 0.0 && !blocked(lo)) {
    y_hi = y_lo;
    hi = lo;
    y_lo -= kStep;
    if (y_lo < y_floor) {
      throw Error(Errc::NotConverged,
                  "no self-consistent Sigma above sigma_floor");
    }
    lo = at(y_lo);
  }

  boost::math::tools::eps_tolerance<double> tol(50);
  std::uintmax_t max_iter = 200;

  auto solve_closure = [&](double a, double b) {
    auto fn = [&](double y) { return closure_value(at(y), p, mode); };
    std::uintmax_t it = max_iter;
    const auto r = boost::math::tools::toms748_solve(fn, a, b, tol, it);
    return Root{std::exp(0.5 * (r.first + r.second)), false};
  };

  if (!blocked(lo)) return solve_closure(y_lo, y_hi);

  // The equation for sigma0 changes sign between lo and hi: locate h = 0
  // from above, then decide whether a closure root lies above it.
  auto h_fn = [&](double y) { return at(y).h; };
  std::uintmax_t it = max_iter;
  const auto hr = boost::math::tools::toms748_solve(h_fn, y_lo, y_hi, tol, it);
  double y_h = hr.second;
  Probe edge = at(y_h);
  if (edge.h <= 0.0) {
    y_h = std::nextafter(y_h, y_hi);
    edge = at(y_h);
  }
  if (closure_value(edge, p, mode) >= 0.0 && y_h < y_hi) {
    return solve_closure(y_h, y_hi);
  }
  return Root{edge.sigma, true};
}

AnsatzState fill_state(const Probe& pr, double eps_prime, double sigma0) {
  AnsatzState st;
  st.eta = pr.f.eta;
  st.v_ind = pr.f.v_ind;
  st.f_stat = pr.f.f_stat;
  st.w = pr.b.w;
  st.u = pr.b.u;
  st.v = pr.b.v;
  st.gap = pr.b.gap;
  const ThetaSigma ts = theta_sigma_from_gap(pr.b.gap, eps_prime, pr.b.u);
  st.sigma_cap = ts.sigma_cap;
  st.cos_theta = ts.cos_theta;
  st.sin_theta = ts.sin_theta;
  st.theta = std::atan2(ts.sin_theta, ts.cos_theta);
  st.eps_prime = eps_prime;
  st.sigma0 = sigma0;
  return st;
}

AnsatzState assemble(const Probe& pr, const ModelParams& p, bool on_h_boundary) {
  const double u2 = pr.b.u * pr.b.u;
  const double gap = pr.b.gap;
  const double sg = pr.sigma;
  const double excess = std::max(sg * sg - gap * gap, 0.0);
  const double eps_from_gap = std::sqrt(excess) / (2.0 * pr.b.u);

  double eps_prime = 0.0;
  if (on_h_boundary) {
    eps_prime = std::max(eps_from_gap, p.epsilon);
  } else if (p.epsilon > 0.0) {
    // Two algebraically equal routes to eps'; pick the better conditioned.
    const double cond_h = (pr.h > 0.0) ? sg / pr.h : std::numeric_limits<double>::infinity();
    const double cond_gap = (excess > 0.0) ? sg * sg / excess
                                           : std::numeric_limits<double>::infinity();
    eps_prime = (cond_h <= cond_gap) ? p.epsilon * sg / pr.h : eps_from_gap;
  }
  const ThetaSigma ts = theta_sigma_from_gap(gap, eps_prime, pr.b.u);
  const double sigma0 = 4.0 * u2 * eps_prime / ts.sigma_cap;
  return fill_state(pr, eps_prime, sigma0);
}

// The phase is decided by the unbiased problem: localized when its largest
// root sits on the h = 0 boundary, i.e. sigma0 stays finite as eps -> 0.
Branch classify(const ModelParams& p, const SpectralEvaluator& ev,
                const SolverOpts& opts, int& evals) {
  ModelParams unbiased = p;
  unbiased.epsilon = 0.0;
  const Root r = largest_root(unbiased, ev, opts, Closure::Full, evals);
  return r.on_h_boundary ? Branch::Localized : Branch::Delocalized;
}

AnsatzState decoupled_guess(const ModelParams& p) {
  Probe pr;
  pr.f = BathFunctionals{};
  pr.b = uvw(1.0, 0.0, p.k_ising, p.delta);
  pr.sigma = pr.b.gap;
  pr.h = pr.sigma;
  const double sigma0 = 4.0 * pr.b.u * pr.b.u * p.epsilon / pr.sigma;
  return fill_state(pr, p.epsilon, sigma0);
}

SolveReport solve_picard(const ModelParams& p, const SpectralEvaluator& ev,
                         const SolverOpts& opts) {
  AnsatzState cur = opts.warm_start.value_or(decoupled_guess(p));
  double damping = opts.damping;
  int oscillations = 0;
  double last_step = 0.0;

  for (int it = 1; it <= opts.max_iter; ++it) {
    const AnsatzState next = apply_fixed_point_map(cur, p, ev);
    const double change = max_relative_change(cur, next);
    if (change < opts.fp_tol) {
      SolveReport rep;
      rep.state = next;
      rep.iterations = it;
      rep.residual = max_relative_change(next, apply_fixed_point_map(next, p, ev));
      int evals = 0;
      rep.branch = classify(p, ev, opts, evals);
      rep.validity = assess_validity(next, p, opts.alpha_c);
      return rep;
    }

    const double step = next.sigma_cap - cur.sigma_cap;
    if (last_step != 0.0 && step * last_step < 0.0) {
      if (++oscillations >= 3) {
        damping = std::max(0.5 * damping, 1e-4);
        oscillations = 0;
      }
    } else {
      oscillations = 0;
    }
    last_step = step;

    AnsatzState mixed = next;
    mixed.sigma_cap = cur.sigma_cap + damping * step;
    mixed.sigma0 = cur.sigma0;
    mixed.sigma0 += damping * (next.sigma0 - cur.sigma0);
    if (!(mixed.sigma_cap >= 1e-300)) {
      throw Error(Errc::DegenerateGap, "Sigma underflowed during iteration");
    }
    cur = mixed;
  }
  throw Error(Errc::NotConverged, "Picard iteration exceeded max_iter = " +
                                      std::to_string(opts.max_iter));
}

double rel_change(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace

AnsatzState apply_fixed_point_map(const AnsatzState& state,
                                  const ModelParams& params,
                                  const SpectralEvaluator& bath) {
  const Probe pr = probe(bath, params, state.sigma_cap);
  const double eps_prime = params.epsilon + pr.f.f_stat * state.sigma0;
  const ThetaSigma ts = theta_sigma_from_gap(pr.b.gap, eps_prime, pr.b.u);
  const double sigma0 = 4.0 * pr.b.u * pr.b.u * eps_prime / ts.sigma_cap;
  return fill_state(pr, eps_prime, sigma0);
}

double max_relative_change(const AnsatzState& a, const AnsatzState& b) {
  return std::max({rel_change(a.sigma_cap, b.sigma_cap),
                   rel_change(a.sigma0, b.sigma0),
                   rel_change(a.eps_prime, b.eps_prime),
                   rel_change(a.eta, b.eta), rel_change(a.v_ind, b.v_ind),
                   rel_change(a.f_stat, b.f_stat)});
}

Validity assess_validity(const AnsatzState& state, const ModelParams& params,
                         std::optional<double> alpha_c) {
  Validity v;
  v.eps_prime_ok = state.eps_prime <= 0.05 * params.omega_c;
  v.alpha_ok = !alpha_c.has_value() || params.alpha <= 1.1 * *alpha_c;
  v.gap_positive = state.gap > 0.0;
  return v;
}

SolveReport solve(const ModelParams& params, const SpectralEvaluator& bath,
                  const SolverOpts& opts) {
  validate(opts);
  if (opts.method == SolveMethod::Picard) return solve_picard(params, bath, opts);

  int evals = 0;
  const Root root = largest_root(params, bath, opts, Closure::Full, evals);
  const Probe pr = probe(bath, params, root.sigma);
  SolveReport rep;
  rep.state = assemble(pr, params, root.on_h_boundary);
  rep.iterations = evals;
  rep.residual =
      max_relative_change(rep.state, apply_fixed_point_map(rep.state, params, bath));
  if (params.epsilon == 0.0) {
    rep.branch = root.on_h_boundary ? Branch::Localized : Branch::Delocalized;
  } else {
    rep.branch = classify(params, bath, opts, evals);
  }
  rep.validity = assess_validity(rep.state, params, opts.alpha_c);
  return rep;
}

SolveReport solve(const ModelParams& params, const BathSpec& bath,
                  const SolverOpts& opts) {
  return solve(params, SpectralEvaluator(bath, opts.quad), opts);
}

SolveReport solve(const ModelParams& params, const SolverOpts& opts) {
  return solve(params, continuum_bath(params), opts);
}

AnsatzState solve_without_static_shift(const ModelParams& params,
                                       const SpectralEvaluator& bath,
                                       const SolverOpts& opts) {
  validate(opts);
  int evals = 0;
  const Root root = largest_root(params, bath, opts, Closure::Pinned, evals);
  const Probe pr = probe(bath, params, root.sigma);
  return fill_state(pr, params.epsilon, 0.0);
}

}  // namespace tqsb
