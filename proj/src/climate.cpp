#include "paleo/climate.hpp"

#include <cmath>

namespace paleo {

void DynamicsParams::validate() const {
  const double values[] = {beta0, beta1, beta2, delta, alpha, sigma1, sigma2};
  for (double v : values)
    if (!std::isfinite(v)) throw ConfigError("non-finite climate dynamics parameter");
  if (sigma1 < 0.0 || sigma2 < 0.0)
    throw ConfigError("climate diffusion scales must be non-negative");
}

}  // namespace paleo
