#include "impes/fluid.hpp"

#include "impes/error.hpp"

namespace impes {

void FluidModel::validate() const {
  if (!(mu_w > 0.0) || !(mu_n > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "viscosities must be positive");
  }
  if (!(porosity > 0.0) || porosity > 1.0) {
    throw Error(ErrorCode::InvalidArgument, "porosity must lie in (0, 1]");
  }
  if (!(entry_pressure >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "entry pressure must be nonnegative");
  }
  if (!(sat_clamp > 0.0) || sat_clamp > 1e-3) {
    throw Error(ErrorCode::InvalidArgument, "saturation clamp must lie in (0, 1e-3]");
  }
}

}  // namespace impes
