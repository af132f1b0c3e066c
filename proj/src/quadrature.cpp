#include "tqsb/quadrature.hpp"

namespace tqsb {

void validate(const QuadratureOpts& opts) {
  if (!(opts.rel_tol > 0.0)) {
    throw Error(Errc::InvalidParameter, "quadrature rel_tol must be positive");
  }
  if (!(opts.abs_tol > 0.0)) {
    throw Error(Errc::InvalidParameter, "quadrature abs_tol must be positive");
  }
  if (opts.max_subdivisions < 1) {
    throw Error(Errc::InvalidParameter,
                "quadrature max_subdivisions must be >= 1");
  }
}

}  // namespace tqsb
