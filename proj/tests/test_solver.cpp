#include <doctest.h>

#include <cmath>
#include <vector>

#include "tqsb/error.hpp"
#include "tqsb/observables.hpp"
#include "tqsb/phase.hpp"
#include "tqsb/solver.hpp"

using namespace tqsb;

namespace {

ModelParams point(double alpha, double s = 1.0, double eps = 1e-5,
                  double k = 0.0, double delta = 0.1) {
  ModelParams p;
  p.delta = delta;
  p.epsilon = eps;
  p.k_ising = k;
  p.alpha = alpha;
  p.s = s;
  return p;
}

// alpha_c for s = 1, Delta = 0.1, K = 0
constexpr double kOhmicAlphaC = 0.1337955930;

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("uvw") {
  const auto a = uvw(1.0, 0.0, 0.0, 0.1);
  CHECK(a.w == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(a.u == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(a.v == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(a.gap == doctest::Approx(0.1).epsilon(1e-15));

  const auto b = uvw(1.0, 0.3, 0.0, 0.1);
  const double w = std::sqrt(0.1);
  CHECK(b.w == doctest::Approx(w).epsilon(1e-15));
  CHECK(b.u * b.u == doctest::Approx((1.0 + 0.3 / w) / 2.0).epsilon(1e-14));
  CHECK(b.u == doctest::Approx(0.98709).epsilon(1e-5));
  CHECK(b.v == doctest::Approx(0.16018).epsilon(1e-4));
  CHECK(b.u * b.u + b.v * b.v == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(b.gap == doctest::Approx(w - 0.3).epsilon(1e-13));

  const auto c = uvw(1.0, 1e6, 0.0, 0.1);
  CHECK(c.u == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.v < 1e-7);
  // gap = W - (V - K) keeps relative accuracy where the difference cancels
  CHECK(c.gap == doctest::Approx(0.01 / (c.w + 1e6)).epsilon(1e-12));
}

TEST_CASE("theta_sigma") {
  const auto a = theta_sigma(0.1, 0.0, 0.0, 0.0, 0.7);
  CHECK(a.sigma_cap == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(a.cos_theta == 1.0);
  CHECK(a.sin_theta == 0.0);

  const auto b = theta_sigma(0.1, 0.3, 0.0, 0.0, 0.9);
  CHECK(b.sigma_cap == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(b.cos_theta == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(b.sin_theta == doctest::Approx(1.0).epsilon(1e-15));

  const auto c = theta_sigma_from_gap(0.004, 1e-3, 1.0);
  const double sig = std::sqrt(1.6e-5 + 4e-6);
  CHECK(c.sigma_cap == doctest::Approx(sig).epsilon(1e-14));
  CHECK(c.sigma_cap == doctest::Approx(4.472e-3).epsilon(1e-4));
  CHECK(c.cos_theta * c.cos_theta ==
        doctest::Approx((1.0 + 0.004 / sig) / 2.0).epsilon(1e-14));
  CHECK(c.cos_theta * c.cos_theta + c.sin_theta * c.sin_theta ==
        doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(theta_sigma_from_gap(0.0, 0.0, 1.0), Error);
}

TEST_CASE("options are validated") {
  SolverOpts o;
  CHECK_NOTHROW(validate(o));
  o.damping = 0.0;
  CHECK_THROWS_AS(validate(o), Error);
  o.damping = 1.5;
  CHECK_THROWS_AS(validate(o), Error);
  o = {};
  o.fp_tol = 0.0;
  CHECK_THROWS_AS(validate(o), Error);
  o = {};
  o.max_iter = 0;
  CHECK_THROWS_AS(solve(point(0.05), o), Error);
}

TEST_CASE("decoupled bath") {
  for (auto method : {SolveMethod::Bracketed, SolveMethod::Picard}) {
    SolverOpts o;
    o.method = method;
    const auto r = solve(point(0.0), o);
    CHECK(r.state.eta == 1.0);
    CHECK(r.state.v_ind == 0.0);
    CHECK(r.state.f_stat == 0.0);
    CHECK(r.state.w == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(r.state.sigma0 == doctest::Approx(2e-4).epsilon(1e-6));
    CHECK(r.branch == Branch::Delocalized);
    CHECK(r.validity.all());
  }
}

TEST_CASE("Ohmic delocalized and localized points") {
  const auto below = solve(point(0.12));
  CHECK(below.branch == Branch::Delocalized);
  CHECK(below.state.sigma0 > 0.0);
  // O(eps): halving the bias halves sigma0
  CHECK(solve(point(0.12, 1.0, 5e-6)).state.sigma0 ==
        doctest::Approx(0.5 * below.state.sigma0).epsilon(1e-3));

  const auto above = solve(point(0.145));
  CHECK(above.branch == Branch::Localized);
  CHECK(above.state.sigma0 > 100 * 1e-5 / 0.1);

  double prev = above.state.sigma0;
  for (double a : {0.15, 0.16, 0.17}) {
    const double s0 = solve(point(a)).state.sigma0;
    CHECK(s0 > prev);
    prev = s0;
  }
  // steep rise: sigma0 grows by an order of magnitude across a few percent of alpha_c
  CHECK(solve(point(1.02 * kOhmicAlphaC)).state.sigma0 >
        10 * solve(point(0.98 * kOhmicAlphaC)).state.sigma0);
}

TEST_CASE("branch follows the unbiased phase") {
  for (double s : {0.5, 1.0}) {
    const double ac = find_alpha_c(0.1, 0.0, s).alpha_c;
    CHECK(solve(point(0.99 * ac, s)).branch == Branch::Delocalized);
    CHECK(solve(point(1.01 * ac, s)).branch == Branch::Localized);
    CHECK(solve(point(0.99 * ac, s, 0.0)).branch == Branch::Delocalized);
    CHECK(solve(point(1.01 * ac, s, 0.0)).branch == Branch::Localized);
  }
}

TEST_CASE("unbiased localized solution has finite sigma0") {
  const auto r = solve(point(0.15, 1.0, 0.0));
  CHECK(r.branch == Branch::Localized);
  CHECK(r.state.sigma0 > 0.1);
  CHECK(check_identities(r.state, point(0.15, 1.0, 0.0)).ok());
  const auto d = solve(point(0.1, 1.0, 0.0));
  CHECK(d.state.sigma0 == 0.0);
  CHECK(d.state.sigma_cap == doctest::Approx(d.state.gap).epsilon(1e-14));
}

TEST_CASE("Picard and bracketed solutions agree") {
  SolverOpts picard;
  picard.method = SolveMethod::Picard;
  for (double s : {0.5, 0.75, 1.0}) {
    const double ac = find_alpha_c(0.1, 0.0, s).alpha_c;
    for (double f : {0.3, 0.8, 1.1, 1.3}) {
      CAPTURE(s);
      CAPTURE(f);
      const auto p = point(f * ac, s);
      const auto a = solve(p);
      const auto b = solve(p, picard);
      CHECK(b.state.sigma_cap == doctest::Approx(a.state.sigma_cap).epsilon(1e-8));
      CHECK(b.state.sigma0 == doctest::Approx(a.state.sigma0).epsilon(1e-7));
      CHECK(ground_energy(b.state, p) ==
            doctest::Approx(ground_energy(a.state, p)).epsilon(1e-12));
      CHECK(a.branch == b.branch);
    }
  }
}

TEST_CASE("warm start reaches the same fixed point faster") {
  SolverOpts picard;
  picard.method = SolveMethod::Picard;
  const auto cold = solve(point(0.1), picard);
  picard.warm_start = solve(point(0.099), picard).state;
  const auto warm = solve(point(0.1), picard);
  CHECK(warm.iterations < cold.iterations);
  CHECK(warm.state.sigma_cap == doctest::Approx(cold.state.sigma_cap).epsilon(1e-9));
}

TEST_CASE("Picard reports NotConverged when out of iterations") {
  SolverOpts o;
  o.method = SolveMethod::Picard;
  o.max_iter = 2;
  try {
    solve(point(0.12), o);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotConverged);
  }
}

TEST_CASE("converged state is a fixed point of the map") {
  const SolverOpts o;
  for (double s : {0.25, 0.5, 1.0}) {
    const double ac = find_alpha_c(0.1, 0.0, s).alpha_c;
    for (double f : {0.0, 0.5, 0.95, 1.05, 1.1}) {
      const auto p = point(f * ac, s);
      const SpectralEvaluator ev(continuum_bath(p));
      const auto r = solve(p, ev, o);
      const auto again = apply_fixed_point_map(r.state, p, ev);
      CHECK(max_relative_change(r.state, again) <= 10 * o.fp_tol);
      CHECK(r.residual <= 10 * o.fp_tol);
      CHECK(check_identities(r.state, p).ok());
    }
  }
}

TEST_CASE("no branch jumps below the transition") {
  for (double s : {0.5, 1.0}) {
    const double ac = find_alpha_c(0.1, 0.0, s).alpha_c;
    const int n = 90;
    std::vector<double> sig(n + 1), s0(n + 1);
    for (int i = 0; i <= n; ++i) {
      const auto r = solve(point(0.9 * ac * i / n, s));
      sig[i] = r.state.sigma_cap;
      s0[i] = r.state.sigma0;
      CHECK(r.branch == Branch::Delocalized);
    }
    // consecutive steps stay within a small factor of their neighbours
    for (int i = 2; i <= n; ++i) {
      const double d1 = std::abs(sig[i] - sig[i - 1]);
      const double d0 = std::abs(sig[i - 1] - sig[i - 2]);
      CHECK(d1 < 3.0 * d0 + 1e-12);
      CHECK(std::abs(s0[i] - s0[i - 1]) < 0.2 * s0[i - 1]);
    }
  }
}

TEST_CASE("sigma0 is linear in eps in the delocalized phase") {
  for (double s : {0.25, 0.5, 0.75, 1.0}) {
    const double ac = find_alpha_c(0.1, 0.0, s).alpha_c;
    for (double f : {0.0, 0.3, 0.6, 0.9}) {
      const double a = solve(point(f * ac, s, 1e-6)).state.sigma0;
      const double b = solve(point(f * ac, s, 2e-6)).state.sigma0;
      CHECK(b / a == doctest::Approx(2.0).epsilon(1e-3));
    }
  }
}

TEST_CASE("energy is stationary in sigma0") {
  for (double s : {0.5, 1.0}) {
    const double ac = find_alpha_c(0.1, 0.0, s).alpha_c;
    for (double f : {0.2, 0.9, 1.05, 1.1}) {
      const auto p = point(f * ac, s);
      const auto st = solve(p).state;
      const double e = ground_energy(st, p);
      const double h = 1e-4 * std::max(st.sigma0, 1e-3);
      const double de = (energy_at_sigma0(st, p, st.sigma0 + h) -
                         energy_at_sigma0(st, p, st.sigma0 - h)) /
                        (2 * h);
      CHECK(std::abs(de) < 1e-6 * std::abs(e));
      CHECK(energy_at_sigma0(st, p, st.sigma0) == doctest::Approx(e).epsilon(1e-13));
    }
  }
}

TEST_CASE("pinned sigma0 ansatz") {
  const auto p = point(0.1);
  const SpectralEvaluator ev(continuum_bath(p));
  const auto st = solve_without_static_shift(p, ev);
  CHECK(st.sigma0 == 0.0);
  CHECK(st.eps_prime == p.epsilon);
  CHECK(st.sigma_cap * st.sigma_cap ==
        doctest::Approx(st.gap * st.gap + 4 * st.u * st.u * 1e-10).epsilon(1e-12));
}

TEST_CASE("validity flags") {
  SolverOpts o;
  o.alpha_c = kOhmicAlphaC;
  CHECK(solve(point(0.14), o).validity.all());
  const auto r = solve(point(0.16), o);
  CHECK_FALSE(r.validity.alpha_ok);
  CHECK(r.validity.gap_positive);
  // strongly localized: eps' = F sigma0 leaves the validity window
  CHECK_FALSE(solve(point(0.6), o).validity.eps_prime_ok);
}

TEST_CASE("discrete bath solve") {
  const DiscreteBath d{{{0.05, 0.5}}};
  const auto r = solve(point(0.0), BathSpec(d));
  const double xi = 0.5 / (0.5 + r.state.sigma_cap);
  CHECK(r.state.eta == doctest::Approx(std::exp(-0.0025 * xi * xi / 0.5)).epsilon(1e-14));
  CHECK(r.residual < 1e-10);
}

}  // TEST_SUITE
