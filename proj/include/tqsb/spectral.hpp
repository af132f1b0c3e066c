#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "tqsb/model.hpp"
#include "tqsb/quadrature.hpp"

namespace tqsb {

/// The three bath functionals entering the transformed Hamiltonian, all at
/// the same gap Sigma (mode function xi(omega) = omega / (omega + Sigma)).
struct BathFunctionals {
  double eta = 1.0;     // exp(-sum g^2 xi^2 / (2 omega^2))
  double v_ind = 0.0;   // sum g^2 xi (2 - xi) / (2 omega)
  double f_stat = 0.0;  // sum g^2 (1 - xi)^2 / omega
};

/// Evaluates eta, V and F in one pass. Continuum baths are integrated with
/// the interval split at omega = Sigma; below the split omega = Sigma t^(1/s)
/// absorbs the omega^(s-1) endpoint behaviour, above it a logarithmic
/// variable handles the many decades up to the cutoff.
BathFunctionals bath_functionals(const BathSpec& bath, double sigma_cap,
                                 const QuadratureOpts& opts = {});

double eta_of_sigma(const BathSpec& bath, double sigma_cap,
                    const QuadratureOpts& opts = {});
double v_of_sigma(const BathSpec& bath, double sigma_cap,
                  const QuadratureOpts& opts = {});
double f_of_sigma(const BathSpec& bath, double sigma_cap,
                  const QuadratureOpts& opts = {});

/// Small-Sigma form of F for a continuum bath:
/// 2 pi alpha omega_c (1-s)/sin[pi(1-s)] (Sigma/omega_c)^s, equal to
/// 2 alpha Sigma at s = 1.
double f_asymptotic(double alpha, double s, double sigma_cap,
                    double omega_c = 1.0);

/// Logarithmic discretization with bins [omega_c L^-(k+1), omega_c L^-k],
/// g_k^2 = integral of J over the bin and omega_k the J-weighted bin mean.
/// The remainder below omega_c L^-n_bins is dropped.
DiscreteBath log_discretize(const ContinuumBath& bath, double lambda,
                            int n_bins);

/// Memoizing front end for bath_functionals. Copies share one cache; lookups
/// are keyed on the exact bit pattern of Sigma and guarded by a mutex.
class SpectralEvaluator {
 public:
  explicit SpectralEvaluator(BathSpec bath, QuadratureOpts opts = {});

  BathFunctionals operator()(double sigma_cap) const;

  const BathSpec& bath() const noexcept { return bath_; }
  const QuadratureOpts& opts() const noexcept { return opts_; }
  std::size_t cache_size() const;

 private:
  struct Cache {
    std::mutex mutex;
    std::unordered_map<std::uint64_t, BathFunctionals> entries;
  };
  static constexpr std::size_t kMaxEntries = 1 << 16;

  BathSpec bath_;
  QuadratureOpts opts_;
  std::shared_ptr<Cache> cache_;
};

}  // namespace tqsb
