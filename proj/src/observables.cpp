#include "tqsb/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "tqsb/error.hpp"

namespace tqsb {

namespace {

// W + V - K, rewritten when V - K < 0 so that it does not cancel.
double w_plus_vk(const AnsatzState& st, const ModelParams& p) {
  const double vk = st.v_ind - p.k_ising;
  if (vk >= 0.0) return st.w + vk;
  const double ed = st.eta * p.delta;
  return ed * ed / (st.w - vk);
}

}  // namespace

std::array<double, 3> symmetric3_eigenvalues(const std::array<double, 9>& a) {
  // Eigen's iterative QR path; the closed-form cubic loses ~sqrt(eps) near
  // the double zero eigenvalue of a pure state.
  const Eigen::Matrix3d m = Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(a.data());
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(m, Eigen::EigenvaluesOnly);
  const Eigen::Vector3d ev = solver.eigenvalues();
  return {ev(0), ev(1), ev(2)};
}

std::array<double, 3> ReducedDensityMatrix::active_eigenvalues() const {
  return symmetric3_eigenvalues(
      {m[0], m[1], m[2], m[4], m[5], m[6], m[8], m[9], m[10]});
}

double ground_energy(const AnsatzState& st, const ModelParams& p) {
  return -0.5 * (w_plus_vk(st, p) + st.sigma_cap) - st.v_ind +
         0.25 * st.f_stat * st.sigma0 * st.sigma0;
}

double energy_at_sigma0(const AnsatzState& st, const ModelParams& p,
                        double sigma0) {
  const double eps_prime = p.epsilon + st.f_stat * sigma0;
  const double sigma = std::hypot(st.gap, 2.0 * st.u * eps_prime);
  return -0.5 * (w_plus_vk(st, p) + sigma) - st.v_ind +
         0.25 * st.f_stat * sigma0 * sigma0;
}

double sigma_x_avg(const AnsatzState& st, const ModelParams& p) {
  return st.eta * st.eta * p.delta * st.cos_theta * st.cos_theta / st.w;
}

double sigma_z_avg(const AnsatzState& st) {
  return 2.0 * st.eps_prime * st.u * st.u / st.sigma_cap;
}

double correlation_c12(const AnsatzState& st) {
  const double c2 = st.cos_theta * st.cos_theta;
  const double s2 = st.sin_theta * st.sin_theta;
  return (st.u * st.u - st.v * st.v) * c2 + s2 -
         0.25 * st.sigma0 * st.sigma0;
}

ReducedDensityMatrix reduced_density_matrix(const AnsatzState& st) {
  const double c = st.cos_theta;
  const double s = st.sin_theta;
  const double plus = st.u * c + s;
  const double minus = st.u * c - s;
  const double eta = st.eta;
  const double eta4 = (eta * eta) * (eta * eta);
  const double coh = st.v * eta * c / std::numbers::sqrt2;

  ReducedDensityMatrix rho;
  auto& m = rho.m;
  m[0] = 0.5 * plus * plus;
  m[5] = st.v * st.v * c * c;
  m[10] = 0.5 * minus * minus;
  m[1] = m[4] = coh * plus;
  m[6] = m[9] = coh * minus;
  m[2] = m[8] = 0.5 * (st.u * st.u * c * c - s * s) * eta4;
  return rho;
}

namespace {
constexpr double kEigenRoundoff = 1e-14;
}  // namespace

double entanglement_entropy(const ReducedDensityMatrix& rho) {
  double entropy = 0.0;
  for (double lambda : rho.active_eigenvalues()) {
    if (lambda < -1e-10) {
      throw Error(Errc::NegativeEigenvalueBeyondTolerance,
                  "reduced density matrix eigenvalue " + std::to_string(lambda));
    }
    // Eigenvalues within round-off of 0 or 1 contribute nothing, so pure
    // states come out as exactly zero.
    if (lambda <= kEigenRoundoff || lambda >= 1.0 - kEigenRoundoff) continue;
    entropy -= lambda * std::log2(lambda);
  }
  return entropy;
}

Susceptibility susceptibility(const ModelParams& params,
                              const SpectralEvaluator& bath,
                              const SolverOpts& opts) {
  ModelParams unbiased = params;
  unbiased.epsilon = 0.0;
  const SolveReport base = solve(unbiased, bath, opts);
  if (base.branch == Branch::Localized) {
    throw Error(Errc::NotInDelocalizedPhase,
                "unbiased ground state is localized");
  }
  const AnsatzState& st = base.state;
  const double h = st.sigma_cap - 4.0 * st.u * st.u * st.f_stat;
  if (!(h > 0.0)) {
    throw Error(Errc::NotInDelocalizedPhase, "critical or beyond");
  }

  Susceptibility out;
  out.closed_form = 2.0 * st.u * st.u / h;

  auto ratio = [&](double eps) {
    ModelParams biased = params;
    biased.epsilon = eps;
    return sigma_z_avg(solve(biased, bath, opts).state) / eps;
  };
  out.value = ratio(1e-8);
  out.value_coarse = ratio(1e-7);
  out.consistent = std::abs(out.value - out.value_coarse) <= 1e-3 * std::abs(out.value);
  return out;
}

GroundStateReport make_report(const SolveReport& solved,
                              const ModelParams& params) {
  GroundStateReport r;
  r.state = solved.state;
  r.branch = solved.branch;
  r.validity = solved.validity;
  r.iterations = solved.iterations;
  r.residual = solved.residual;
  r.e_g = ground_energy(r.state, params);
  r.sx = sigma_x_avg(r.state, params);
  r.sz = sigma_z_avg(r.state);
  r.c12 = correlation_c12(r.state);
  r.rho = reduced_density_matrix(r.state);
  r.entropy = entanglement_entropy(r.rho);
  return r;
}

GroundStateReport ground_state(const ModelParams& params,
                               const SpectralEvaluator& bath,
                               const SolverOpts& opts, bool with_chi) {
  GroundStateReport r = make_report(solve(params, bath, opts), params);
  if (with_chi) {
    try {
      r.chi = susceptibility(params, bath, opts).value;
    } catch (const Error& e) {
      if (e.code() != Errc::NotInDelocalizedPhase) throw;
    }
  }
  return r;
}

void to_json(nlohmann::json& j, const GroundStateReport& r) {
  j = nlohmann::json{{"e_g", r.e_g},
                     {"sx", r.sx},
                     {"sz", r.sz},
                     {"entropy", r.entropy},
                     {"c12", r.c12},
                     {"rho", r.rho.m},
                     {"branch", std::string(to_string(r.branch))},
                     {"valid", r.validity.all()},
                     {"eps_prime_ok", r.validity.eps_prime_ok},
                     {"alpha_ok", r.validity.alpha_ok},
                     {"gap_positive", r.validity.gap_positive},
                     {"eta", r.state.eta},
                     {"v_ind", r.state.v_ind},
                     {"f_stat", r.state.f_stat},
                     {"w", r.state.w},
                     {"u", r.state.u},
                     {"v", r.state.v},
                     {"sigma_cap", r.state.sigma_cap},
                     {"theta", r.state.theta},
                     {"sigma0", r.state.sigma0},
                     {"eps_prime", r.state.eps_prime},
                     {"iterations", r.iterations},
                     {"residual", r.residual}};
  j["chi"] = r.chi ? nlohmann::json(*r.chi) : nlohmann::json(nullptr);
}

}  // namespace tqsb
