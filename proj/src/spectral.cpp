#include "tqsb/spectral.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "tqsb/error.hpp"

namespace tqsb {

namespace {

void require_positive_sigma(double sigma_cap) {
  if (!(sigma_cap > 0.0) || !std::isfinite(sigma_cap)) {
    throw Error(Errc::InvalidParameter, "Sigma must be positive and finite");
  }
}

// Dimensionless integrals over x = omega / omega_c in [0, 1]:
//   a_eta = int x^s / (x + sg)^2
//   a_v   = int x^(s-1) x (x + 2 sg) / (x + sg)^2
//   a_f   = int x^(s-1) sg^2 / (x + sg)^2
struct Reduced {
  double a_eta = 0.0;
  double a_v = 0.0;
  double a_f = 0.0;
};

Reduced continuum_integrals(double s, double sg, const QuadratureOpts& opts) {
  Reduced out;

  // [0, b] with x = b tau^(1/s); x^(s-1) dx = (b^s / s) dtau.
  const double b = std::min(sg, 1.0);
  const double inv_s = 1.0 / s;
  auto lower = [&](double tau) {
    const double x = (s == 1.0) ? b * tau : b * std::pow(tau, inv_s);
    const double r = sg / (x + sg);
    // sg * x/(x+sg)^2 = r (1 - r) keeps the first component O(1).
    return std::array<double, 3>{r * (1.0 - r), 1.0 - r * r, r * r};
  };
  const auto lo = integrate<3>(lower, 0.0, 1.0, opts);
  const double pref = std::pow(b, s) * inv_s;
  out.a_eta = pref * lo.value[0] / sg;
  out.a_v = pref * lo.value[1];
  out.a_f = pref * lo.value[2];

  if (sg < 1.0) {
    // [sg, 1] with x = sg e^y; dx = x dy. Powers of sg are pulled out so
    // every component is O(1) relative to its own tolerance.
    const double span = -std::log(sg);
    auto upper = [&](double y) {
      const double r = 1.0 / (1.0 + std::exp(y));
      const double one_minus_r = 1.0 / (1.0 + std::exp(-y));
      const double grow = std::exp(s * y);
      return std::array<double, 3>{std::exp((s - 1.0) * y) * one_minus_r *
                                       one_minus_r,
                                   grow * (1.0 - r * r), grow * r * r};
    };
    const int panels =
        std::clamp(static_cast<int>(std::ceil(span / 4.0)), 1,
                   std::max(1, opts.max_subdivisions / 2));
    const auto hi = integrate<3>(upper, 0.0, span, opts, panels);
    const double sg_s = std::pow(sg, s);
    out.a_eta += sg_s / sg * hi.value[0];
    out.a_v += sg_s * hi.value[1];
    out.a_f += sg_s * hi.value[2];
  }
  return out;
}

}  // namespace

BathFunctionals bath_functionals(const BathSpec& bath, double sigma_cap,
                                 const QuadratureOpts& opts) {
  require_positive_sigma(sigma_cap);
  validate(opts);

  if (const auto* c = std::get_if<ContinuumBath>(&bath)) {
    if (c->alpha == 0.0) return {};
    const Reduced r = continuum_integrals(c->s, sigma_cap / c->omega_c, opts);
    return {std::exp(-c->alpha * r.a_eta), c->alpha * c->omega_c * r.a_v,
            2.0 * c->alpha * c->omega_c * r.a_f};
  }

  const auto& d = std::get<DiscreteBath>(bath);
  double exponent = 0.0;
  BathFunctionals out;
  out.v_ind = 0.0;
  out.f_stat = 0.0;
  for (const Mode& m : d.modes) {
    const double g2 = m.g * m.g;
    const double xi = m.omega / (m.omega + sigma_cap);
    const double one_minus_xi = sigma_cap / (m.omega + sigma_cap);
    exponent += g2 * xi * xi / (2.0 * m.omega * m.omega);
    out.v_ind += g2 * xi * (2.0 - xi) / (2.0 * m.omega);
    out.f_stat += g2 * one_minus_xi * one_minus_xi / m.omega;
  }
  out.eta = std::exp(-exponent);
  return out;
}

double eta_of_sigma(const BathSpec& bath, double sigma_cap,
                    const QuadratureOpts& opts) {
  return bath_functionals(bath, sigma_cap, opts).eta;
}

double v_of_sigma(const BathSpec& bath, double sigma_cap,
                  const QuadratureOpts& opts) {
  return bath_functionals(bath, sigma_cap, opts).v_ind;
}

double f_of_sigma(const BathSpec& bath, double sigma_cap,
                  const QuadratureOpts& opts) {
  return bath_functionals(bath, sigma_cap, opts).f_stat;
}

double f_asymptotic(double alpha, double s, double sigma_cap, double omega_c) {
  if (sigma_cap <= 0.0) return 0.0;
  const double x = 1.0 - s;
  // x / sin(pi x) -> 1/pi (1 + (pi x)^2 / 6) near the Ohmic point
  const double ratio =
      (std::abs(x) < 1e-6)
          ? (1.0 + std::numbers::pi * std::numbers::pi * x * x / 6.0) /
                std::numbers::pi
          : x / std::sin(std::numbers::pi * x);
  return 2.0 * std::numbers::pi * alpha * omega_c * ratio *
         std::pow(sigma_cap / omega_c, s);
}

DiscreteBath log_discretize(const ContinuumBath& bath, double lambda,
                            int n_bins) {
  validate_bath(bath);
  if (!(lambda > 1.0)) {
    throw Error(Errc::InvalidParameter, "discretization base must exceed 1");
  }
  if (n_bins < 1) {
    throw Error(Errc::InvalidParameter, "need at least one bin");
  }
  const double s = bath.s;
  const double wc = bath.omega_c;
  DiscreteBath out;
  out.modes.reserve(static_cast<std::size_t>(n_bins));
  for (int k = 0; k < n_bins; ++k) {
    const double hi = wc * std::pow(lambda, -k);
    const double lo = hi / lambda;
    const double m1 = (std::pow(hi, s + 1.0) - std::pow(lo, s + 1.0)) / (s + 1.0);
    const double m2 = (std::pow(hi, s + 2.0) - std::pow(lo, s + 2.0)) / (s + 2.0);
    const double weight = 2.0 * bath.alpha * std::pow(wc, 1.0 - s) * m1;
    out.modes.push_back({std::sqrt(weight), m2 / m1});
  }
  return out;
}

SpectralEvaluator::SpectralEvaluator(BathSpec bath, QuadratureOpts opts)
    : bath_(std::move(bath)), opts_(opts), cache_(std::make_shared<Cache>()) {
  validate_bath(bath_);
  validate(opts_);
}

BathFunctionals SpectralEvaluator::operator()(double sigma_cap) const {
  const auto key = std::bit_cast<std::uint64_t>(sigma_cap);
  {
    std::lock_guard lock(cache_->mutex);
    if (auto it = cache_->entries.find(key); it != cache_->entries.end()) {
      return it->second;
    }
  }
  // Computed outside the lock so distinct arguments do not serialize.
  const BathFunctionals value = bath_functionals(bath_, sigma_cap, opts_);
  std::lock_guard lock(cache_->mutex);
  if (cache_->entries.size() >= kMaxEntries) cache_->entries.clear();
  cache_->entries.emplace(key, value);
  return value;
}

std::size_t SpectralEvaluator::cache_size() const {
  std::lock_guard lock(cache_->mutex);
  return cache_->entries.size();
}

}  // namespace tqsb
