#include "tqsb/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "tqsb/error.hpp"

namespace tqsb {

namespace {

void require_finite(double value, const char* field) {
  if (!std::isfinite(value)) {
    throw Error(Errc::InvalidParameter, std::string(field) + " is not finite");
  }
}

double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale == 0.0) return 0.0;
  return std::abs(a - b) / scale;
}

}  // namespace

ModelParams validate(const ModelParams& params,
                     std::vector<std::string>* warnings) {
  require_finite(params.delta, "delta");
  require_finite(params.epsilon, "epsilon");
  require_finite(params.k_ising, "k_ising");
  require_finite(params.alpha, "alpha");
  require_finite(params.s, "s");
  require_finite(params.omega_c, "omega_c");

  if (params.omega_c <= 0.0) {
    throw Error(Errc::InvalidParameter, "omega_c must be positive");
  }
  if (params.delta <= 0.0) {
    throw Error(Errc::NonPositiveDelta, "delta must be positive");
  }
  if (params.s > 1.0) {
    throw Error(Errc::SuperOhmicUnsupported,
                "s > 1: the super-Ohmic bath never localizes");
  }
  if (params.s <= 0.0) {
    throw Error(Errc::InvalidExponent, "s must lie in (0, 1]");
  }
  if (params.alpha < 0.0) {
    throw Error(Errc::NegativeAlpha, "alpha must be non-negative");
  }

  ModelParams out = params;
  out.delta = params.delta / params.omega_c;
  out.epsilon = params.epsilon / params.omega_c;
  out.k_ising = params.k_ising / params.omega_c;
  out.omega_c = 1.0;

  if (out.epsilon < 0.0 || out.epsilon > kMaxBias) {
    std::ostringstream msg;
    msg << "epsilon/omega_c = " << out.epsilon << " outside [0, " << kMaxBias
        << "]";
    throw Error(Errc::BiasOutOfRange, msg.str());
  }
  if (out.epsilon > kWarnBias && warnings != nullptr) {
    std::ostringstream msg;
    msg << "epsilon/omega_c = " << out.epsilon
        << " exceeds the weak-bias regime (" << kWarnBias << ")";
    warnings->push_back(msg.str());
  }
  return out;
}

BathSpec continuum_bath(const ModelParams& params) {
  return ContinuumBath{params.alpha, params.s, params.omega_c};
}

void validate_bath(const BathSpec& bath) {
  if (const auto* c = std::get_if<ContinuumBath>(&bath)) {
    if (!(c->alpha >= 0.0) || !std::isfinite(c->alpha)) {
      throw Error(Errc::InvalidBath, "continuum alpha must be >= 0");
    }
    if (!(c->s > 0.0 && c->s <= 1.0)) {
      throw Error(Errc::InvalidBath, "continuum s must lie in (0, 1]");
    }
    if (!(c->omega_c > 0.0) || !std::isfinite(c->omega_c)) {
      throw Error(Errc::InvalidBath, "continuum omega_c must be positive");
    }
    return;
  }
  const auto& d = std::get<DiscreteBath>(bath);
  if (d.modes.empty()) {
    throw Error(Errc::InvalidBath, "discrete bath has no modes");
  }
  for (std::size_t k = 0; k < d.modes.size(); ++k) {
    if (!(d.modes[k].omega > 0.0) || !std::isfinite(d.modes[k].omega) ||
        !std::isfinite(d.modes[k].g)) {
      throw Error(Errc::InvalidBath,
                  "mode " + std::to_string(k) + " needs finite g and omega > 0");
    }
  }
}

double spectral_density(const BathSpec& bath, double omega) {
  const auto* c = std::get_if<ContinuumBath>(&bath);
  if (c == nullptr) {
    throw Error(Errc::DiscreteBathHasNoDensity,
                "discrete baths are evaluated through mode sums");
  }
  if (omega < 0.0) {
    throw Error(Errc::InvalidParameter, "omega must be non-negative");
  }
  if (omega > c->omega_c) return 0.0;
  return 2.0 * c->alpha * std::pow(omega, c->s) * std::pow(c->omega_c, 1.0 - c->s);
}

bool StateIdentityCheck::ok() const {
  return normalization <= 1e-12 && w_identity <= 1e-10 &&
         sigma_identity <= 1e-10 && angle <= 1e-12 && sigma0_identity <= 1e-8 &&
         eps_prime_identity <= 1e-8;
}

StateIdentityCheck check_identities(const AnsatzState& st,
                                    const ModelParams& params) {
  StateIdentityCheck c;
  c.normalization = std::abs(st.u * st.u + st.v * st.v - 1.0);

  const double vk = st.v_ind - params.k_ising;
  const double ed = st.eta * params.delta;
  c.w_identity = rel_diff(st.w * st.w, ed * ed + vk * vk);

  const double two_eu = 2.0 * st.eps_prime * st.u;
  c.sigma_identity =
      rel_diff(st.sigma_cap * st.sigma_cap, st.gap * st.gap + two_eu * two_eu);

  c.angle = std::abs(st.cos_theta * st.cos_theta +
                     st.sin_theta * st.sin_theta - 1.0);

  c.sigma0_identity =
      rel_diff(st.sigma0, 4.0 * st.u * st.u * st.eps_prime / st.sigma_cap);
  c.eps_prime_identity =
      rel_diff(st.eps_prime, params.epsilon + st.f_stat * st.sigma0);
  return c;
}

void to_json(nlohmann::json& j, const ModelParams& p) {
  j = nlohmann::json{{"delta", p.delta},     {"epsilon", p.epsilon},
                     {"k_ising", p.k_ising}, {"alpha", p.alpha},
                     {"s", p.s},             {"omega_c", p.omega_c}};
}

void from_json(const nlohmann::json& j, ModelParams& p) {
  if (!j.is_object()) {
    throw Error(Errc::InvalidConfig, "model parameters must be a JSON object");
  }
  for (const char* key : {"delta", "epsilon", "k_ising", "alpha", "s"}) {
    if (!j.contains(key)) {
      throw Error(Errc::InvalidConfig, std::string("missing key '") + key + "'");
    }
  }
  p.delta = j.at("delta").get<double>();
  p.epsilon = j.at("epsilon").get<double>();
  p.k_ising = j.at("k_ising").get<double>();
  p.alpha = j.at("alpha").get<double>();
  p.s = j.at("s").get<double>();
  p.omega_c = j.value("omega_c", 1.0);
}

void to_json(nlohmann::json& j, const AnsatzState& st) {
  j = nlohmann::json{{"eta", st.eta},
                     {"v_ind", st.v_ind},
                     {"f_stat", st.f_stat},
                     {"w", st.w},
                     {"u", st.u},
                     {"v", st.v},
                     {"gap", st.gap},
                     {"sigma_cap", st.sigma_cap},
                     {"cos_theta", st.cos_theta},
                     {"sin_theta", st.sin_theta},
                     {"theta", st.theta},
                     {"sigma0", st.sigma0},
                     {"eps_prime", st.eps_prime}};
}

}  // namespace tqsb
