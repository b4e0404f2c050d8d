#ifndef PALEO_CLIMATE_HPP
#define PALEO_CLIMATE_HPP

#include <cmath>

#include "paleo/errors.hpp"
#include "paleo/rng.hpp"

namespace paleo {

struct DynamicsParams {
  double beta0 = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double delta = 0.0;   // 1/kyr
  double alpha = 0.0;   // time-scale ratio
  double sigma1 = 0.0;  // per sqrt(kyr)
  double sigma2 = 0.0;

  void validate() const;
};

struct ClimateState {
  double x1 = 0.0;
  double x2 = 0.0;
  double t = 0.0;  // kyr
};

struct ClimateDrift {
  double d1 = 0.0;
  double d2 = 0.0;
};

struct IntegratorConfig {
  double max_step = 0.2;  // kyr

  void validate() const {
    if (!(max_step > 0.0)) throw ConfigError("integrator max_step must be positive");
  }
};

inline ClimateDrift drift(const ClimateState& state, const DynamicsParams& p,
                          double forcing_value) {
  const double x1 = state.x1, x2 = state.x2;
  ClimateDrift d;
  d.d1 = -(p.beta0 + p.beta1 * x1 + p.beta2 * (x1 * x1 * x1 - x1) + p.delta * x2 + forcing_value);
  d.d2 = p.alpha * p.delta * (x1 + x2 - x2 * x2 * x2 / 3.0);
  return d;
}

// One Euler-Maruyama substep of size h; forcing frozen at the left endpoint.
template <typename ForcingAt>
inline ClimateState em_step(ClimateState state, double h, const DynamicsParams& p,
                            ForcingAt&& forcing_at, RngStream& rng) {
  const ClimateDrift d = drift(state, p, forcing_at(state.t));
  const double sqrt_h = std::sqrt(h);
  state.x1 += d.d1 * h + p.sigma1 * sqrt_h * rng.normal();
  state.x2 += d.d2 * h + p.sigma2 * sqrt_h * rng.normal();
  state.t += h;
  return state;
}

// Partition [state.t, t_end] into n = ceil(delta/max_step) equal substeps.
// n is computed deterministically from the endpoints so replayed streams see
// the same draw count; the final substep lands exactly on t_end.
inline std::size_t substep_count(double t_from, double t_end, double max_step) {
  const double delta = t_end - t_from;
  if (delta <= 0.0) return 0;
  const double ratio = delta / max_step;
  std::size_t n = static_cast<std::size_t>(std::ceil(ratio - 1e-12));
  if (n == 0) n = 1;
  return n;
}

template <typename ForcingAt>
inline ClimateState integrate(ClimateState state, double t_end, const DynamicsParams& p,
                              ForcingAt&& forcing_at, const IntegratorConfig& config,
                              RngStream& rng) {
  if (t_end < state.t)
    throw OrderingError("integration target precedes the current state time");
  const std::size_t n = substep_count(state.t, t_end, config.max_step);
  if (n == 0) return state;
  const double t_from = state.t;
  const double h = (t_end - t_from) / static_cast<double>(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    state = em_step(state, h, p, forcing_at, rng);
    state.t = t_from + static_cast<double>(i + 1) * h;  // keep the grid exact
  }
  state = em_step(state, h, p, forcing_at, rng);
  state.t = t_end;
  return state;
}

}  // namespace paleo

#endif
