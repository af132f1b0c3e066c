#pragma once

#include <array>
#include <optional>

#include "tqsb/model.hpp"
#include "tqsb/solver.hpp"
#include "tqsb/spectral.hpp"

namespace tqsb {

/// Two-qubit reduced density matrix in the basis
/// {|uu>, (|ud>+|du>)/sqrt2, |dd>, (|ud>-|du>)/sqrt2}, row-major. The last
/// (singlet) row and column are identically zero.
struct ReducedDensityMatrix {
  std::array<double, 16> m{};

  double operator()(int i, int j) const { return m[4 * i + j]; }
  double trace() const { return m[0] + m[5] + m[10] + m[15]; }
  /// Eigenvalues of the active 3x3 block, ascending.
  std::array<double, 3> active_eigenvalues() const;
};

/// Eigenvalues of a real symmetric 3x3 matrix (row-major), ascending.
std::array<double, 3> symmetric3_eigenvalues(const std::array<double, 9>& a);

double ground_energy(const AnsatzState& state, const ModelParams& params);

/// Ground-state energy with the bath profile (eta, V, F, W, u) frozen and the
/// static displacement set to `sigma0`; eps' and Sigma follow from it.
double energy_at_sigma0(const AnsatzState& state, const ModelParams& params,
                        double sigma0);

double sigma_x_avg(const AnsatzState& state, const ModelParams& params);
double sigma_z_avg(const AnsatzState& state);
double correlation_c12(const AnsatzState& state);

ReducedDensityMatrix reduced_density_matrix(const AnsatzState& state);

/// Von Neumann entropy (base 2) of the active block. Throws
/// Errc::NegativeEigenvalueBeyondTolerance below -1e-10.
double entanglement_entropy(const ReducedDensityMatrix& rho);

struct Susceptibility {
  double value = 0.0;        // <sz>/eps at eps = 1e-8
  double value_coarse = 0.0; // <sz>/eps at eps = 1e-7
  double closed_form = 0.0;  // 2 u^2 / (Sigma - 4 u^2 F) at eps = 0
  bool consistent = false;   // value and value_coarse agree to 0.1%
};

/// Static susceptibility approached from the delocalized side. Throws
/// Errc::NotInDelocalizedPhase when the unbiased state is localized.
Susceptibility susceptibility(const ModelParams& params,
                              const SpectralEvaluator& bath,
                              const SolverOpts& opts = {});

struct GroundStateReport {
  double e_g = 0.0;
  double sx = 0.0;
  double sz = 0.0;
  std::optional<double> chi;
  double entropy = 0.0;
  double c12 = 0.0;
  ReducedDensityMatrix rho;
  Branch branch = Branch::Delocalized;
  Validity validity;
  AnsatzState state;
  int iterations = 0;
  double residual = 0.0;
};

GroundStateReport make_report(const SolveReport& solved,
                              const ModelParams& params);

/// Solve and evaluate every observable; chi is filled when requested and the
/// point is delocalized.
GroundStateReport ground_state(const ModelParams& params,
                               const SpectralEvaluator& bath,
                               const SolverOpts& opts = {},
                               bool with_chi = false);

void to_json(nlohmann::json& j, const GroundStateReport& r);

}  // namespace tqsb
