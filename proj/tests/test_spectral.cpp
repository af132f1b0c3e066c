#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <thread>
#include <vector>

#include "tqsb/error.hpp"
#include "tqsb/spectral.hpp"

using namespace tqsb;

namespace {

// Brute-force midpoint sums of the three continuum integrals (omega_c = 1),
// computed with omega = t^2 so the omega^(s-1) endpoint becomes regular.
struct Brute {
  double eta_exponent = 0.0;  // alpha * int omega^s / (omega + S)^2
  double v = 0.0;
  double f = 0.0;
};

Brute riemann(double alpha, double s, double sig, long n) {
  const double h = 1.0 / static_cast<double>(n);
  // Neumaier sums keep the 1e7-term totals at round-off level.
  struct Acc {
    double sum = 0.0, c = 0.0;
    void add(double x) {
      const double t = sum + x;
      c += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
      sum = t;
    }
    double get() const { return sum + c; }
  } e, v, f;
  for (long i = 0; i < n; ++i) {
    const double t = (static_cast<double>(i) + 0.5) * h;
    const double w = t * t;
    const double jac = 2.0 * t;
    const double ws1 = std::pow(w, s - 1.0);
    const double d = w + sig;
    e.add(jac * ws1 * w / (d * d));
    v.add(jac * ws1 * w * (w + 2.0 * sig) / (d * d));
    f.add(jac * ws1 * sig * sig / (d * d));
  }
  return {alpha * e.get() * h, alpha * v.get() * h, 2.0 * alpha * f.get() * h};
}

double ohmic_eta(double alpha, double sig) {
  return std::exp(-alpha * (std::log((1.0 + sig) / sig) - 1.0 / (1.0 + sig)));
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("zero coupling gives trivial functionals") {
  const BathSpec bath = ContinuumBath{0.0, 0.5, 1.0};
  for (double sig : {1e-6, 0.01, 1.0}) {
    const auto b = bath_functionals(bath, sig);
    CHECK(b.eta == 1.0);
    CHECK(b.v_ind == 0.0);
    CHECK(b.f_stat == 0.0);
  }
}

TEST_CASE("Ohmic functionals match their closed forms") {
  const double alpha = 0.1;
  const BathSpec bath = ContinuumBath{alpha, 1.0, 1.0};
  for (double sig : {1e-7, 1e-4, 0.05, 0.3, 2.0}) {
    CAPTURE(sig);
    const auto b = bath_functionals(bath, sig);
    CHECK(b.eta == doctest::Approx(ohmic_eta(alpha, sig)).epsilon(1e-10));
    CHECK(b.v_ind == doctest::Approx(alpha / (1.0 + sig)).epsilon(1e-10));
    CHECK(b.f_stat == doctest::Approx(2.0 * alpha * sig / (1.0 + sig)).epsilon(1e-10));
  }
}

TEST_CASE("eta at Sigma = 0.05 agrees with closed form and brute force") {
  const double alpha = 0.1;
  const double sig = 0.05;
  const double quad = eta_of_sigma(ContinuumBath{alpha, 1.0, 1.0}, sig);
  const double brute = std::exp(-riemann(alpha, 1.0, sig, 10'000'000).eta_exponent);
  CHECK(quad == doctest::Approx(ohmic_eta(alpha, sig)).epsilon(1e-8));
  CHECK(quad == doctest::Approx(brute).epsilon(1e-8));
}

TEST_CASE("sub-Ohmic functionals agree with brute-force sums") {
  const double alpha = 0.1;
  const double s = 0.5;
  const BathSpec bath = ContinuumBath{alpha, s, 1.0};
  for (double sig : {0.02, 0.01}) {
    CAPTURE(sig);
    const auto ref = riemann(alpha, s, sig, 10'000'000);
    const auto b = bath_functionals(bath, sig);
    CHECK(b.v_ind == doctest::Approx(ref.v).epsilon(1e-8));
    CHECK(b.f_stat == doctest::Approx(ref.f).epsilon(1e-8));
    CHECK(b.eta == doctest::Approx(std::exp(-ref.eta_exponent)).epsilon(1e-8));
  }
}

TEST_CASE("limits in Sigma") {
  const BathSpec ohmic = ContinuumBath{0.1, 1.0, 1.0};
  CHECK(v_of_sigma(ohmic, 1e-8) == doctest::Approx(0.1).epsilon(1e-5));
  CHECK(eta_of_sigma(ohmic, 1e6) > 1.0 - 1e-6);
  const BathSpec sub = ContinuumBath{0.1, 0.5, 1.0};
  CHECK(f_of_sigma(sub, 1e-6) < 0.1 * f_of_sigma(sub, 1e-3));
  CHECK(f_of_sigma(sub, 1e-6) > 0.0);
}

TEST_CASE("asymptotic F") {
  CHECK(f_asymptotic(0.1, 0.5, 0.01) ==
        doctest::Approx(std::numbers::pi * 0.01).epsilon(1e-14));
  CHECK(f_asymptotic(0.125, 1.0, 0.004) == doctest::Approx(0.001).epsilon(1e-14));
  CHECK(f_asymptotic(0.1, 0.5, 0.0) == 0.0);
  // continuous through s = 1
  CHECK(f_asymptotic(0.1, 1.0 - 1e-9, 0.01) ==
        doctest::Approx(f_asymptotic(0.1, 1.0, 0.01)).epsilon(1e-7));
  const BathSpec sub = ContinuumBath{0.1, 0.5, 1.0};
  CHECK(f_of_sigma(sub, 0.01) ==
        doctest::Approx(f_asymptotic(0.1, 0.5, 0.01)).epsilon(0.02));
}

TEST_CASE("quadrature F approaches the asymptote as Sigma shrinks") {
  for (double s : {0.25, 0.5, 0.75}) {
    const BathSpec bath = ContinuumBath{0.05, s, 1.0};
    double prev = INFINITY;
    for (double sig : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
      const double rel =
          std::abs(f_of_sigma(bath, sig) / f_asymptotic(0.05, s, sig) - 1.0);
      CHECK(rel < prev);
      prev = rel;
    }
    CHECK(prev < 0.02);
  }
}

TEST_CASE("monotonicity in Sigma") {
  for (double s : {0.2, 0.5, 0.8, 1.0}) {
    const BathSpec bath = ContinuumBath{0.2, s, 1.0};
    BathFunctionals prev = bath_functionals(bath, 1e-8);
    for (int i = 1; i <= 60; ++i) {
      const double sig = 1e-8 * std::pow(10.0, i * 9.0 / 60.0);
      const auto b = bath_functionals(bath, sig);
      CHECK(b.eta >= prev.eta);
      if (prev.eta > 0.0) CHECK(b.eta > prev.eta);
      CHECK(b.v_ind < prev.v_ind);
      CHECK(b.f_stat > prev.f_stat);
      prev = b;
    }
  }
}

TEST_CASE("non-positive Sigma is rejected") {
  const BathSpec bath = ContinuumBath{0.1, 1.0, 1.0};
  CHECK_THROWS_AS(bath_functionals(bath, 0.0), Error);
  CHECK_THROWS_AS(bath_functionals(bath, -1.0), Error);
}

TEST_CASE("discrete sums") {
  const DiscreteBath d{{{0.2, 0.5}, {0.1, 0.1}}};
  const double sig = 0.05;
  double e = 0.0, v = 0.0, f = 0.0;
  for (const auto& m : d.modes) {
    const double xi = m.omega / (m.omega + sig);
    e += m.g * m.g * xi * xi / (2 * m.omega * m.omega);
    v += m.g * m.g * xi * (2 - xi) / (2 * m.omega);
    f += m.g * m.g * (1 - xi) * (1 - xi) / m.omega;
  }
  const auto b = bath_functionals(d, sig);
  CHECK(b.eta == doctest::Approx(std::exp(-e)).epsilon(1e-15));
  CHECK(b.v_ind == doctest::Approx(v).epsilon(1e-15));
  CHECK(b.f_stat == doctest::Approx(f).epsilon(1e-15));
}

TEST_CASE("log discretization conserves the bath weight per bin") {
  const ContinuumBath c{0.1, 0.5, 1.0};
  const auto d = log_discretize(c, 2.0, 6);
  REQUIRE(d.modes.size() == 6);
  for (int k = 0; k < 6; ++k) {
    const double hi = std::pow(2.0, -k);
    const double lo = hi / 2.0;
    // int 2 alpha w^s dw = 2 alpha (hi^(s+1) - lo^(s+1)) / (s+1)
    const double g2 = 2 * 0.1 * (std::pow(hi, 1.5) - std::pow(lo, 1.5)) / 1.5;
    CHECK(d.modes[k].g * d.modes[k].g == doctest::Approx(g2).epsilon(1e-12));
    CHECK(d.modes[k].omega > lo);
    CHECK(d.modes[k].omega < hi);
  }
  CHECK_THROWS_AS(log_discretize(c, 1.0, 4), Error);
  CHECK_THROWS_AS(log_discretize(c, 2.0, 0), Error);
}

TEST_CASE("fine log discretization converges to the continuum") {
  for (double s : {0.5, 1.0}) {
    const ContinuumBath c{0.1, s, 1.0};
    const auto d = log_discretize(c, 1.08, 400);
    for (double sig : {0.01, 0.05, 0.3}) {
      CAPTURE(s);
      CAPTURE(sig);
      const auto bc = bath_functionals(c, sig);
      const auto bd = bath_functionals(d, sig);
      CHECK(bd.eta == doctest::Approx(bc.eta).epsilon(0.01));
      CHECK(bd.v_ind == doctest::Approx(bc.v_ind).epsilon(0.01));
      CHECK(bd.f_stat == doctest::Approx(bc.f_stat).epsilon(0.01));
    }
  }
}

TEST_CASE("evaluator memoizes and shares its cache across copies") {
  const SpectralEvaluator ev(ContinuumBath{0.1, 0.5, 1.0});
  CHECK(ev.cache_size() == 0);
  const auto a = ev(0.01);
  CHECK(ev.cache_size() == 1);
  const SpectralEvaluator copy = ev;
  const auto b = copy(0.01);
  CHECK(copy.cache_size() == 1);
  CHECK(a.eta == b.eta);
  CHECK(a.v_ind == b.v_ind);
  CHECK(a.f_stat == b.f_stat);
  const auto direct = bath_functionals(ev.bath(), 0.01, ev.opts());
  CHECK(direct.f_stat == a.f_stat);
}

TEST_CASE("concurrent evaluation gives the serial values") {
  const SpectralEvaluator ev(ContinuumBath{0.2, 0.75, 1.0});
  std::vector<double> sig(64);
  for (int i = 0; i < 64; ++i) sig[i] = 1e-6 * std::pow(1.2, i);
  std::vector<double> par(64);
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (int i = t; i < 64; i += 4) par[i] = ev(sig[i]).f_stat;
    });
  }
  for (auto& th : threads) th.join();
  for (int i = 0; i < 64; ++i) {
    CHECK(par[i] == bath_functionals(ev.bath(), sig[i], ev.opts()).f_stat);
  }
}

}  // TEST_SUITE
