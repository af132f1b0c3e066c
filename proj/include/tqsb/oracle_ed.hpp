#pragma once

#include <optional>
#include <vector>

#include "tqsb/model.hpp"

namespace tqsb {

struct TruncationSpec {
  int n_max = 4;                 // bosons per mode
  std::optional<int> total_cap;  // bound on the total boson number
};

/// Largest Hilbert-space dimension the oracle accepts.
inline constexpr long long kMaxEdDimension = 4'000'000;
inline constexpr int kMaxEdModes = 8;

/// Number of basis states (two qubits times truncated Fock space). Throws
/// Errc::DimensionTooLarge or Errc::InvalidParameter.
long long ed_dimension(int n_modes, const TruncationSpec& trunc);

struct LanczosOpts {
  double tol = 1e-10;         // residual norm |H x - E x|
  int max_matvecs = 20000;
  int krylov_dim = 80;        // clamped by the memory budget below
  double memory_budget_mb = 512.0;
};

struct EdResult {
  double energy = 0.0;
  double sz = 0.0;  // (<sz_1> + <sz_2>) / 2
  double sx = 0.0;  // (<sx_1> + <sx_2>) / 2
  double residual = 0.0;
  int matvecs = 0;
  long long dimension = 0;
};

/// Lowest eigenpair of the full two-qubit spin-boson Hamiltonian with a
/// discrete bath, applied matrix-free. Throws Errc::NotConverged or
/// Errc::DimensionTooLarge.
EdResult exact_ground(const ModelParams& params, const DiscreteBath& bath,
                      const TruncationSpec& trunc = {},
                      const LanczosOpts& opts = {});

struct TruncationRow {
  int n_max = 0;
  double energy = 0.0;
  double change = 0.0;  // E(n_max) - E(previous n_max); 0 for the first row
};

struct TruncationSweep {
  std::vector<TruncationRow> rows;
  /// Aitken extrapolation from the last three energies (last energy when the
  /// differences do not shrink geometrically).
  double extrapolated = 0.0;
  bool unconverged = false;  // |E(n) - E(n-1)| > 1e-8 at the largest n_max
};

TruncationSweep truncation_sweep(const ModelParams& params,
                                 const DiscreteBath& bath,
                                 const std::vector<int>& n_max_list,
                                 const LanczosOpts& opts = {});

}  // namespace tqsb
