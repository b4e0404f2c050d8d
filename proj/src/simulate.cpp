#include "paleo/simulate.hpp"

#include <cmath>
#include <sstream>

#include "paleo/util.hpp"

namespace paleo {

void SimulationConfig::validate() const {
  if (!(core_length_m > 0.0)) throw ConfigError("core_length_m must be positive");
  if (!(slice_spacing_m > 0.0)) throw ConfigError("slice_spacing_m must be positive");
  if (!(first_tiepoint_sd_kyr > 0.0)) throw ConfigError("first_tiepoint_sd_kyr must be positive");
  if (!(time_floor < 0.0)) throw ConfigError("time_floor must be negative");
  if (retry_cap < 1) throw ConfigError("retry_cap must be positive");
  if (name.empty()) throw ConfigError("simulation name must not be empty");
  integrator.validate();
  state_init.validate();
  true_params.validate();
}

SimulationResult simulate_core(const SimulationConfig& config, const ForcingGrid* forcing) {
  config.validate();
  const ModelParams& p = config.true_params;
  if (!p.weights.all_zero() && !forcing)
    throw ConfigError("nonzero true forcing weights but no forcing grid");

  const std::size_t m_total =
      static_cast<std::size_t>(std::llround(config.core_length_m / config.slice_spacing_m)) + 1;
  std::vector<double> depths(m_total);
  for (std::size_t i = 0; i < m_total; ++i)
    depths[i] = config.core_length_m + 0.5 * config.slice_spacing_m -
                static_cast<double>(i) * config.slice_spacing_m;

  SimulationResult result;
  result.grid = make_depth_grid(depths, p.archive);
  const std::vector<double>& hc = result.grid.corrected_depths;

  RngStream chron_rng(rng_key(config.seed, {rng_tag::simulate, 1}));
  std::vector<double> ages(m_total);
  int attempt = 0;
  for (; attempt < config.retry_cap; ++attempt) {
    ages[m_total - 1] = sample_ig(hc[m_total - 1] / p.archive.mu_s,
                                  hc[m_total - 1] * hc[m_total - 1] /
                                      (p.archive.sigma_s * p.archive.sigma_s),
                                  chron_rng);
    for (std::size_t i = m_total - 1; i-- > 0;) {
      const double dh = hc[i] - hc[i + 1];
      ages[i] = ages[i + 1] +
                sample_ig(dh / p.archive.mu_s, dh * dh / (p.archive.sigma_s * p.archive.sigma_s),
                          chron_rng);
    }
    if (ages[0] < -config.time_floor) break;
  }
  if (attempt == config.retry_cap)
    throw ConfigError("simulated chronology kept exceeding the time window; "
                      "lower acc_rate pushes ages past time_floor");

  result.truth.chronology.times.resize(m_total);
  for (std::size_t i = 0; i < m_total; ++i) result.truth.chronology.times[i] = -ages[i];
  result.truth.chronology.validate();
  const std::vector<double>& times = result.truth.chronology.times;
  if (forcing && !(forcing->contains(times[0]) && forcing->contains(0.0)))
    throw ConfigError("forcing grid does not cover the simulated chronology");

  RngStream climate_rng(rng_key(config.seed, {rng_tag::simulate, 2}));
  ClimateState state;
  state.t = times[0];
  state.x1 = config.state_init.mean_x1 + config.state_init.sd_x1 * climate_rng.normal();
  state.x2 = config.state_init.mean_x2 + config.state_init.sd_x2 * climate_rng.normal();
  result.truth.x1.resize(m_total);
  result.truth.x2.resize(m_total);
  result.truth.x1[0] = state.x1;
  result.truth.x2[0] = state.x2;
  const ForcingWeights weights = p.weights;
  auto forcing_at = [forcing, weights](double t) {
    return forcing ? forcing->value(t, weights) : 0.0;
  };
  for (std::size_t i = 1; i < m_total; ++i) {
    state = integrate(state, times[i], p.dynamics, forcing_at, config.integrator, climate_rng);
    result.truth.x1[i] = state.x1;
    result.truth.x2[i] = state.x2;
  }

  RngStream noise_rng(rng_key(config.seed, {rng_tag::simulate, 3}));
  result.truth.z.resize(m_total);
  result.truth.y.resize(m_total);
  for (std::size_t i = 0; i < m_total; ++i) {
    result.truth.z[i] = p.calib.d_offset + p.calib.c_scale * result.truth.x1[i];
    result.truth.y[i] = result.truth.z[i] + p.calib.sigma_y * noise_rng.normal();
  }
  result.truth.params = p;

  RngStream tie_rng(rng_key(config.seed, {rng_tag::simulate, 4}));
  TiePoint tie;
  tie.slice = 0;
  tie.age_mean = ages[0] + config.first_tiepoint_sd_kyr * tie_rng.normal();
  tie.age_sd = config.first_tiepoint_sd_kyr;

  result.record.name = config.name;
  result.record.slices.resize(m_total);
  for (std::size_t i = 0; i < m_total; ++i)
    result.record.slices[i] = {depths[i], result.truth.y[i]};
  result.record.tie_points.push_back(tie);
  result.record.content_hash = fnv1a64(serialize_core(result.record));
  result.record.validate();
  return result;
}

void write_truth_csv(const std::string& path, const SimulationResult& result) {
  std::ostringstream out;
  out << "slice,depth_m,T_kyr,x1,x2,z,y\n";
  const std::size_t m_total = result.record.slices.size();
  for (std::size_t i = 0; i < m_total; ++i) {
    out << (i + 1) << "," << format_double(result.grid.depths[i]) << ","
        << format_double(result.truth.chronology.times[i]) << ","
        << format_double(result.truth.x1[i]) << "," << format_double(result.truth.x2[i]) << ","
        << format_double(result.truth.z[i]) << "," << format_double(result.truth.y[i]) << "\n";
  }
  atomic_write_file(path, out.str());
}

}  // namespace paleo
