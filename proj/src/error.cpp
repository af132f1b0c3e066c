#include "tqsb/error.hpp"

namespace tqsb {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::NonPositiveDelta: return "NonPositiveDelta";
    case Errc::SuperOhmicUnsupported: return "SuperOhmicUnsupported";
    case Errc::InvalidExponent: return "InvalidExponent";
    case Errc::NegativeAlpha: return "NegativeAlpha";
    case Errc::BiasOutOfRange: return "BiasOutOfRange";
    case Errc::InvalidParameter: return "InvalidParameter";
    case Errc::InvalidBath: return "InvalidBath";
    case Errc::DiscreteBathHasNoDensity: return "DiscreteBathHasNoDensity";
    case Errc::QuadratureNotConverged: return "QuadratureNotConverged";
    case Errc::NotConverged: return "NotConverged";
    case Errc::DegenerateGap: return "DegenerateGap";
    case Errc::NotInDelocalizedPhase: return "NotInDelocalizedPhase";
    case Errc::NegativeEigenvalueBeyondTolerance:
      return "NegativeEigenvalueBeyondTolerance";
    case Errc::NoSignChange: return "NoSignChange";
    case Errc::InsufficientPoints: return "InsufficientPoints";
    case Errc::NonPositiveData: return "NonPositiveData";
    case Errc::DimensionTooLarge: return "DimensionTooLarge";
    case Errc::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace tqsb
