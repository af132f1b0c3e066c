#pragma once

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace tqsb {

/// Hamiltonian parameters of two biased qubits sharing one bosonic bath.
/// Energies are in units of the bath cutoff omega_c.
struct ModelParams {
  double delta = 0.1;    // intrasite tunneling
  double epsilon = 0.0;  // bias on every qubit
  double k_ising = 0.0;  // direct Ising coupling, K > 0 antiferromagnetic
  double alpha = 0.0;    // dimensionless qubit-bath coupling
  double s = 1.0;        // bath exponent, 0 < s <= 1
  double omega_c = 1.0;  // hard cutoff; the energy unit after validate()

  bool operator==(const ModelParams&) const = default;
};

/// Largest admissible bias (units of omega_c).
inline constexpr double kMaxBias = 1e-3;
/// Bias above which validate() emits a warning.
inline constexpr double kWarnBias = 1e-5;

/// Checks every field and rescales so that omega_c == 1. Warnings (bias
/// above kWarnBias) are appended to `warnings` when it is non-null.
ModelParams validate(const ModelParams& params,
                     std::vector<std::string>* warnings = nullptr);

struct ContinuumBath {
  double alpha = 0.0;
  double s = 1.0;
  double omega_c = 1.0;
};

struct Mode {
  double g = 0.0;      // coupling amplitude
  double omega = 1.0;  // frequency, > 0
};

struct DiscreteBath {
  std::vector<Mode> modes;
};

using BathSpec = std::variant<ContinuumBath, DiscreteBath>;

/// Continuum bath described by the (alpha, s, omega_c) fields of `params`.
BathSpec continuum_bath(const ModelParams& params);

/// Throws Errc::InvalidBath on non-positive frequencies, an empty mode list,
/// or continuum fields outside their domain.
void validate_bath(const BathSpec& bath);

/// J(omega) = 2 alpha omega^s omega_c^(1-s) below the cutoff, zero above.
double spectral_density(const BathSpec& bath, double omega);

/// Converged variables of the variational ground state.
struct AnsatzState {
  double eta = 1.0;        // dressed-tunneling factor
  double v_ind = 0.0;      // bath-induced Ising coupling V
  double f_stat = 0.0;     // static-displacement energy F
  double w = 0.0;          // sqrt(eta^2 Delta^2 + (V-K)^2)
  double u = 0.0;
  double v = 0.0;
  double gap = 0.0;        // W - V + K, evaluated without cancellation
  double sigma_cap = 0.0;  // Sigma
  double cos_theta = 1.0;
  double sin_theta = 0.0;
  double theta = 0.0;
  double sigma0 = 0.0;     // static displacement number
  double eps_prime = 0.0;  // renormalized bias eps + F sigma0
};

/// Relative violations of the algebraic identities tying the state together.
struct StateIdentityCheck {
  double normalization = 0.0;  // |u^2 + v^2 - 1|
  double w_identity = 0.0;     // W^2 vs eta^2 Delta^2 + (V-K)^2
  double sigma_identity = 0.0; // Sigma^2 vs (W-V+K)^2 + 4 eps'^2 u^2
  double angle = 0.0;          // |cos^2 + sin^2 - 1|
  double sigma0_identity = 0.0;// sigma0 vs 4 u^2 eps' / Sigma
  double eps_prime_identity = 0.0;  // eps' vs eps + F sigma0

  bool ok() const;
};

StateIdentityCheck check_identities(const AnsatzState& state,
                                    const ModelParams& params);

void to_json(nlohmann::json& j, const ModelParams& p);
void from_json(const nlohmann::json& j, ModelParams& p);
void to_json(nlohmann::json& j, const AnsatzState& st);

}  // namespace tqsb
