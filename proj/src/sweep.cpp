#include "tqsb/sweep.hpp"

#include "tqsb/error.hpp"
#include "tqsb/parallel.hpp"

namespace tqsb {

std::vector<SweepPoint> alpha_sweep(const ModelParams& base,
                                    const std::vector<double>& alphas,
                                    const SolverOpts& opts) {
  validate(opts);
  return parallel_map<SweepPoint>(alphas.size(), [&](std::size_t i) {
    SweepPoint pt;
    pt.alpha = alphas[i];
    try {
      ModelParams p = base;
      p.alpha = alphas[i];
      p = validate(p);
      pt.report = ground_state(p, SpectralEvaluator(continuum_bath(p), opts.quad), opts);
    } catch (const Error& e) {
      pt.error = e.what();
    }
    return pt;
  });
}

std::vector<double> linear_grid(double lo, double hi, int n) {
  if (n < 2 || !(hi > lo)) {
    throw Error(Errc::InvalidParameter, "linear grid needs lo < hi and n >= 2");
  }
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  }
  out.back() = hi;
  return out;
}

}  // namespace tqsb
