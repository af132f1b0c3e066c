#pragma once

#include <optional>
#include <string_view>

#include "tqsb/model.hpp"
#include "tqsb/spectral.hpp"

namespace tqsb {

/// Two-qubit eigenbasis coefficients of the Ising part of the transformed
/// Hamiltonian.
struct UVW {
  double w = 0.0;
  double u = 0.0;
  double v = 0.0;
  double gap = 0.0;  // W - V + K without cancellation when V - K >> eta Delta
};

UVW uvw(double eta, double v_ind, double k_ising, double delta);

struct ThetaSigma {
  double sigma_cap = 0.0;
  double cos_theta = 1.0;
  double sin_theta = 0.0;
};

/// Mixing of |A> and |B> by the renormalized bias. Throws Errc::DegenerateGap
/// when Sigma underflows.
ThetaSigma theta_sigma(double w, double v_ind, double k_ising, double eps_prime,
                       double u);
/// Same, from a precomputed W - V + K.
ThetaSigma theta_sigma_from_gap(double gap, double eps_prime, double u);

enum class Branch { Delocalized, Localized };
std::string_view to_string(Branch b) noexcept;

enum class SolveMethod {
  /// Largest root of the scalar equation left after eliminating sigma0 and
  /// eps' in favour of Sigma; bracketed, so it does not slow down at the
  /// critical point.
  Bracketed,
  /// Damped Picard iteration on (Sigma, sigma0).
  Picard,
};

struct SolverOpts {
  int max_iter = 10000;
  double fp_tol = 1e-11;
  double damping = 0.5;
  SolveMethod method = SolveMethod::Bracketed;
  /// Starting point for Picard iteration; ignored by the bracketed method.
  std::optional<AnsatzState> warm_start;
  QuadratureOpts quad;
  /// When known, enables the alpha <= 1.1 alpha_c validity flag.
  std::optional<double> alpha_c;
  /// Sigma below which no fixed point is searched for (units of omega_c).
  double sigma_floor = 1e-60;
};

void validate(const SolverOpts& opts);

struct Validity {
  bool eps_prime_ok = true;  // eps' / omega_c <= 0.05
  bool alpha_ok = true;      // alpha <= 1.1 alpha_c (when alpha_c is known)
  bool gap_positive = true;  // W - V + K > 0

  bool all() const { return eps_prime_ok && alpha_ok && gap_positive; }
};

struct SolveReport {
  AnsatzState state;
  int iterations = 0;
  double residual = 0.0;  // max relative change under one more map step
  Branch branch = Branch::Delocalized;  // phase of the same point at eps = 0
  Validity validity;
};

/// Self-consistent ground state for `params` (validated, omega_c = 1).
SolveReport solve(const ModelParams& params, const SpectralEvaluator& bath,
                  const SolverOpts& opts = {});
SolveReport solve(const ModelParams& params, const BathSpec& bath,
                  const SolverOpts& opts = {});
/// Continuum bath built from the alpha and s fields of `params`.
SolveReport solve(const ModelParams& params, const SolverOpts& opts = {});

/// Ansatz with the static displacement pinned to zero (eps' = eps).
AnsatzState solve_without_static_shift(const ModelParams& params,
                                       const SpectralEvaluator& bath,
                                       const SolverOpts& opts = {});

/// One step of the self-consistency map in its coupled form:
/// Sigma -> (eta, V, F) -> (W, u, v) -> eps' = eps + F sigma0 ->
/// Sigma' and sigma0' = 4 u^2 eps' / Sigma'.
AnsatzState apply_fixed_point_map(const AnsatzState& state,
                                  const ModelParams& params,
                                  const SpectralEvaluator& bath);

/// Largest relative change between two states over the self-consistent
/// components (Sigma, sigma0, eps', eta, V, F).
double max_relative_change(const AnsatzState& a, const AnsatzState& b);

Validity assess_validity(const AnsatzState& state, const ModelParams& params,
                         std::optional<double> alpha_c);

}  // namespace tqsb
