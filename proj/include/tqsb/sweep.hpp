#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tqsb/observables.hpp"

namespace tqsb {

struct SweepPoint {
  double alpha = 0.0;
  std::optional<GroundStateReport> report;
  std::optional<std::string> error;  // set instead of report on failure
};

/// Ground state at every alpha in `alphas`, other parameters from `base`
/// (validated here). Points run in parallel and come back in input order.
std::vector<SweepPoint> alpha_sweep(const ModelParams& base,
                                    const std::vector<double>& alphas,
                                    const SolverOpts& opts = {});

/// n evenly spaced values from lo to hi inclusive.
std::vector<double> linear_grid(double lo, double hi, int n);

}  // namespace tqsb
