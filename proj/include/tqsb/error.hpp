#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tqsb {

enum class Errc {
  NonPositiveDelta,
  SuperOhmicUnsupported,
  InvalidExponent,
  NegativeAlpha,
  BiasOutOfRange,
  InvalidParameter,
  InvalidBath,
  DiscreteBathHasNoDensity,
  QuadratureNotConverged,
  NotConverged,
  DegenerateGap,
  NotInDelocalizedPhase,
  NegativeEigenvalueBeyondTolerance,
  NoSignChange,
  InsufficientPoints,
  NonPositiveData,
  DimensionTooLarge,
  InvalidConfig,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above; the
/// message names the offending field or quantity.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace tqsb
