#pragma once

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "tqsb/model.hpp"
#include "tqsb/solver.hpp"
#include "tqsb/spectral.hpp"

namespace tqsb {

struct Criterion {
  /// 1 - 4 u^2 F / (W - V + K) on the unbiased delocalized solution; -1 when
  /// that solution does not exist (the system is then localized).
  double value = 1.0;
  double sigma_cap = 0.0;  // Sigma = W - V + K at the evaluated root
  bool root_found = true;
};

/// The bias in `params` is ignored; the criterion is always taken at eps = 0.
Criterion evaluate_criterion(const ModelParams& params,
                             const SpectralEvaluator& bath,
                             const SolverOpts& opts = {});
double criterion(const ModelParams& params, const SpectralEvaluator& bath,
                 const SolverOpts& opts = {});
/// Continuum bath from params.alpha and params.s.
double criterion(const ModelParams& params, const SolverOpts& opts = {});

struct CriticalSearchOpts {
  double lo = 1e-6;      // initial bracket on the searched axis (alpha)
  double hi = 2.0;
  double width = 1e-8;   // stop once the bracket is this narrow; 0 bisects
                         // down to adjacent doubles
  SolverOpts solver;
};

struct CriticalPoint {
  double alpha_c = 0.0;
  std::array<double, 2> bracket{};  // criterion > 0 at bracket[0], <= 0 at [1]
  double criterion_residual = 0.0;  // criterion at alpha_c
  /// No sign change inside the bracket: alpha_c is the antiferromagnetic
  /// asymptote s K / omega_c instead of a bisection result.
  bool asymptotic = false;
  int evaluations = 0;
};

/// Bisection on the criterion in alpha at fixed (Delta, K, s). Throws
/// Errc::NoSignChange when the bracket shows no transition and no asymptotic
/// root applies.
CriticalPoint find_alpha_c(double delta, double k_ising, double s,
                           const CriticalSearchOpts& opts = {});

struct AxisRoot {
  double value = 0.0;
  std::array<double, 2> bracket{};  // localized side first
  double criterion_residual = 0.0;
  int evaluations = 0;
};

/// Tunneling below which the system localizes at fixed (alpha, K, s).
/// Searched in [1e-9, 10] unless the opts bracket is changed from its
/// alpha defaults.
AxisRoot find_delta_c(double alpha, double k_ising, double s,
                      const CriticalSearchOpts& opts = {});
/// Ising coupling below which the system localizes at fixed (alpha, Delta,
/// s). Searched in [-1, 1], widened on demand.
AxisRoot find_k_c(double alpha, double delta, double s,
                  const CriticalSearchOpts& opts = {});

struct ScalingLimit {
  double alpha_c = 0.0;
  bool always_delocalized = false;  // s > 1
};

/// Delta / omega_c -> 0 limit of the critical coupling: 1/8 for s = 1, 0 for
/// s < 1. Throws Errc::InvalidExponent for s <= 0.
ScalingLimit alpha_c_scaling_limit(double s);

enum class ScanAxis { Delta, K };

struct BoundaryRow {
  double s = 1.0;
  double axis_value = 0.0;
  double alpha_c = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();
  bool asymptotic = false;
  /// K axis only: alpha at which K_r = K - alpha omega_c / s vanishes.
  double asymptote_alpha = std::numeric_limits<double>::quiet_NaN();
  std::optional<std::string> error;
};

/// alpha_c along a sorted grid of Delta (at fixed.k_ising) or K (at
/// fixed.delta), for every s in `s_list`. Each s runs on its own worker and
/// warm-starts the bracket from the previous grid point. Per-point failures
/// are recorded in BoundaryRow::error. Rows are ordered by s, then grid.
std::vector<BoundaryRow> scan_boundary(ScanAxis axis,
                                       const std::vector<double>& grid,
                                       const ModelParams& fixed,
                                       const std::vector<double>& s_list,
                                       const CriticalSearchOpts& opts = {});

struct FitWindow {
  double min = 0.0;
  double max = std::numeric_limits<double>::infinity();
};

struct ExponentFit {
  double value = 0.0;      // the exponent (equal to slope for fit_exponent)
  double slope = 0.0;      // of log10 y against log10 x
  double intercept = 0.0;
  double r_squared = 0.0;
  std::array<double, 2> window{};  // log10 of the smallest and largest x used
  int n_points = 0;

  double decades() const { return window[1] - window[0]; }
  bool accepted() const { return r_squared >= 0.999 && decades() >= 2.0; }
};

/// Least-squares line through (log10 x, log10 y) for the points with x in
/// `window`. Throws Errc::InsufficientPoints (fewer than 10) or
/// Errc::NonPositiveData.
ExponentFit fit_exponent(const std::vector<double>& xs,
                         const std::vector<double>& ys,
                         const FitWindow& window = {});

std::vector<double> log_grid(double lo, double hi, int n);

struct ExponentOpts {
  int n_points = 24;
  /// Relative distance to the critical value along alpha, Delta and K.
  double t_min = 1e-5;
  double t_max = 1e-3;
  /// Bias window (units of omega_c) for the critical isotherm.
  double eps_min = 1e-9;
  double eps_max = 1e-7;
  /// The K crossing is taken at alpha = factor * alpha_c(K = 0) so that the
  /// critical K is positive.
  double zeta_alpha_factor = 1.05;
  QuadratureOpts quad{1e-13, 1e-300, 400};
};

/// Raw samples behind one exponent, kept for output and plotting.
struct ExponentSeries {
  std::vector<double> x;  // distance to the critical value (or eps)
  std::vector<double> y;  // <sz> or chi
};

struct ExponentSuite {
  double s = 1.0;
  double delta = 0.1;
  double k_ising = 0.0;
  double alpha_c = 0.0;
  double delta_c = 0.0;
  double alpha_zeta = 0.0;
  double k_c = 0.0;
  ExponentFit delta_exp;   // <sz> ~ eps^(1/delta) at alpha_c
  ExponentFit gamma;       // chi ~ (alpha_c - alpha)^-gamma
  ExponentFit beta;        // <sz> ~ (alpha - alpha_c)^beta
  ExponentFit beta_prime;  // <sz> ~ (Delta_c - Delta)^beta'
  ExponentFit zeta;        // <sz> ~ (K_c - K)^zeta
  ExponentSeries delta_series, gamma_series, beta_series, beta_prime_series,
      zeta_series;
};

/// All five exponents around the crossing at (Delta, K) for bath exponent s.
/// Sample points are evaluated in parallel.
ExponentSuite exponent_suite(double s, double delta, double k_ising,
                             const ExponentOpts& opts = {});

/// <sz> at eps = 0 on the localized side, alpha = alpha_c (1 + t) for each t;
/// used for beta and for checking that beta does not depend on the crossing.
ExponentFit beta_exponent(double s, double delta, double k_ising,
                          const ExponentOpts& opts = {},
                          ExponentSeries* series = nullptr);

}  // namespace tqsb
