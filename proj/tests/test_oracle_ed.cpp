#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "tqsb/error.hpp"
#include "tqsb/observables.hpp"
#include "tqsb/oracle_ed.hpp"
#include "tqsb/spectral.hpp"

using namespace tqsb;

namespace {

ModelParams point(double eps = 0.0, double k = 0.0, double delta = 0.1) {
  ModelParams p;
  p.delta = delta;
  p.epsilon = eps;
  p.k_ising = k;
  return p;
}

double ansatz_energy(const ModelParams& p, const DiscreteBath& d) {
  return ground_energy(solve(p, BathSpec(d)).state, p);
}

struct TwoQubit {
  double energy, sz, sx;
};

// Dense diagonalization of the bath-free two-qubit problem.
TwoQubit two_qubit(double delta, double eps, double k) {
  Eigen::Matrix2d sx, sz, id;
  sx << 0, 1, 1, 0;
  sz << 1, 0, 0, -1;
  id.setIdentity();
  auto kron = [](const Eigen::Matrix2d& a, const Eigen::Matrix2d& b) {
    Eigen::Matrix4d out;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return out;
  };
  const Eigen::Matrix4d h = -delta / 2 * (kron(sx, id) + kron(id, sx)) -
                            eps / 2 * (kron(sz, id) + kron(id, sz)) +
                            k * kron(sz, sz);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(h);
  const Eigen::Vector4d g = es.eigenvectors().col(0);
  return {es.eigenvalues()(0), g.dot(kron(sz, id) * g), g.dot(kron(sx, id) * g)};
}

}  // namespace

TEST_SUITE("oracle_ed") {

TEST_CASE("dimension bookkeeping") {
  CHECK(ed_dimension(2, {4, {}}) == 100);
  CHECK(ed_dimension(6, {6, {}}) == 4LL * 117649);
  // pairs (n1, n2) with n1 + n2 <= 4
  CHECK(ed_dimension(2, {4, 4}) == 60);
  CHECK(ed_dimension(3, {4, 0}) == 4);
  try {
    ed_dimension(8, {10, {}});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DimensionTooLarge);
  }
  CHECK_THROWS_AS(ed_dimension(9, {1, {}}), Error);
  CHECK_THROWS_AS(ed_dimension(2, {-1, {}}), Error);
  CHECK_THROWS_AS(exact_ground(point(), DiscreteBath{{{0.1, 0.5}, {0.1, 0.2}}}, {1500, {}}), Error);
}

TEST_CASE("decoupled bath") {
  const auto r = exact_ground(point(), DiscreteBath{{{0.0, 0.5}, {0.0, 0.2}}});
  CHECK(r.energy == doctest::Approx(-0.1).epsilon(1e-12));
  CHECK(std::abs(r.sz) < 1e-10);
  CHECK(r.sx == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.residual < 1e-10);
}

TEST_CASE("bath-free spectra match dense diagonalization") {
  for (double k : {-0.2, 0.0, 0.3}) {
    for (double eps : {0.0, 1e-4, 1e-3}) {
      CAPTURE(k);
      CAPTURE(eps);
      const auto ref = two_qubit(0.1, eps, k);
      const auto r = exact_ground(point(eps, k), DiscreteBath{{{0.0, 0.7}}}, {2, {}});
      CHECK(r.energy == doctest::Approx(ref.energy).epsilon(1e-11));
      CHECK(r.sz == doctest::Approx(ref.sz).epsilon(1e-7));
      CHECK(r.sx == doctest::Approx(ref.sx).epsilon(1e-7));
    }
  }
  const auto r = exact_ground(point(0.0, 0.3), DiscreteBath{{{0.0, 0.5}}});
  CHECK(r.energy == doctest::Approx(-std::sqrt(0.09 + 0.01)).epsilon(1e-12));
}

TEST_CASE("single mode: ansatz is a variational upper bound") {
  const DiscreteBath d{{{0.05, 0.5}}};
  const auto p = point(1e-5);
  const auto r = exact_ground(p, d, {6, {}});
  const double ea = ansatz_energy(p, d);
  CHECK(ea >= r.energy - 1e-12);
  CHECK(ea <= r.energy + 1e-3);
  const auto st = solve(p, BathSpec(d)).state;
  CHECK(sigma_z_avg(st) == doctest::Approx(r.sz).epsilon(1e-3));
  CHECK(sigma_x_avg(st, p) == doctest::Approx(r.sx).epsilon(1e-3));
}

TEST_CASE("ansatz bound on log-discretized baths") {
  for (double s : {0.5, 1.0}) {
    for (double alpha : {0.01, 0.05, 0.1}) {
      const auto d = log_discretize(ContinuumBath{alpha, s, 1.0}, 2.0, 4);
      for (double k : {-0.05, 0.0, 0.05}) {
        const auto p = point(1e-5, k);
        const auto r = exact_ground(p, d, {4, {}});
        CHECK(ansatz_energy(p, d) >= r.energy - 1e-12);
      }
    }
  }
}

TEST_CASE("zero bias has no magnetization") {
  const auto d = log_discretize(ContinuumBath{0.05, 0.5, 1.0}, 2.0, 3);
  const auto r = exact_ground(point(0.0, 0.05), d, {5, {}});
  CHECK(std::abs(r.sz) < 1e-8);
  const auto biased = exact_ground(point(1e-4, 0.05), d, {5, {}});
  CHECK(biased.sz > 1e-4);
}

TEST_CASE("energy decreases with the truncation") {
  const auto d = log_discretize(ContinuumBath{0.05, 1.0, 1.0}, 2.0, 3);
  const auto sweep = truncation_sweep(point(1e-5), d, {1, 2, 3, 4, 5, 6});
  REQUIRE(sweep.rows.size() == 6);
  CHECK(sweep.rows[0].change == 0.0);
  for (std::size_t i = 1; i < sweep.rows.size(); ++i) {
    CHECK(sweep.rows[i].energy <= sweep.rows[i - 1].energy + 1e-12);
    CHECK(sweep.rows[i].change ==
          doctest::Approx(sweep.rows[i].energy - sweep.rows[i - 1].energy));
    if (i > 1) CHECK(std::abs(sweep.rows[i].change) <= std::abs(sweep.rows[i - 1].change));
  }
  CHECK_FALSE(sweep.unconverged);
  CHECK(sweep.extrapolated <= sweep.rows.back().energy + 1e-12);
  CHECK(sweep.extrapolated == doctest::Approx(sweep.rows.back().energy).epsilon(1e-8));
}

TEST_CASE("uncoupled modes give a flat sweep") {
  const auto sweep = truncation_sweep(point(), DiscreteBath{{{0.0, 0.3}, {0.0, 0.9}}}, {1, 2, 3});
  for (const auto& row : sweep.rows) CHECK(row.energy == doctest::Approx(-0.1).epsilon(1e-12));
  CHECK_FALSE(sweep.unconverged);
}

TEST_CASE("strong coupling raises the truncation flag") {
  const DiscreteBath d{{{1.0, 0.1}}};
  const auto sweep = truncation_sweep(point(), d, {4, 5, 6});
  CHECK(sweep.unconverged);
  CHECK_THROWS_AS(truncation_sweep(point(), d, {}), Error);
}

TEST_CASE("Lanczos budget exhaustion") {
  LanczosOpts o;
  o.max_matvecs = 3;
  o.krylov_dim = 3;
  const auto d = log_discretize(ContinuumBath{0.05, 1.0, 1.0}, 2.0, 3);
  try {
    exact_ground(point(1e-5), d, {4, {}}, o);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotConverged);
  }
}

TEST_CASE("total occupation cap is variationally above the full space") {
  const auto d = log_discretize(ContinuumBath{0.05, 1.0, 1.0}, 2.0, 3);
  const auto full = exact_ground(point(1e-5), d, {4, {}});
  const auto capped = exact_ground(point(1e-5), d, {4, 2});
  CHECK(capped.dimension < full.dimension);
  CHECK(capped.energy >= full.energy - 1e-12);
  CHECK(capped.energy == doctest::Approx(full.energy).epsilon(1e-2));
}

}  // TEST_SUITE
