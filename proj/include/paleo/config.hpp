#ifndef PALEO_CONFIG_HPP
#define PALEO_CONFIG_HPP

#include <cstdint>
#include <memory>
#include <string>

#include "paleo/orbital.hpp"
#include "paleo/params.hpp"
#include "paleo/prior.hpp"
#include "paleo/simulate.hpp"
#include "paleo/smc.hpp"

namespace paleo {

struct NormalizationSettings {
  double window_start = kOrbitalWindowStart;
  double window_end = kOrbitalWindowEnd;
  double sample_step = 1.0;  // kyr
};

struct ModelSection {
  ModelVariant variant = ModelVariant::forced;
  std::string orbital_series_path;  // trig coefficient table
  std::string orbital_table_path;   // tabulated alternative, mutually exclusive
  double time_floor = kOrbitalWindowStart;
  double forcing_grid_step = 0.1;  // kyr
  NormalizationSettings normalization;
  StateInit state_init;
};

// Fully resolved run configuration. Every default is materialized here and in
// resolved_json, so the manifest records exactly what the run used.
struct RunConfig {
  ModelSection model;
  Prior prior;
  SmcSettings smc;
  std::string out_dir = "out";
  int progress_every = 25;  // slices between progress log lines

  bool has_simulate = false;
  SimulationConfig simulate;

  std::string config_path;
  std::uint64_t config_hash = 0;
  std::string resolved_json;
};

RunConfig default_run_config();

// Parses the JSON run config, applies defaults section by section, and
// rejects unknown keys so typos cannot silently fall back to defaults.
// Relative orbital paths resolve against the config file's directory.
RunConfig load_run_config(const std::string& path);

// Serializes the fully resolved configuration (call after overrides).
std::string resolve_run_config_json(const RunConfig& config);

struct OrbitalData {
  OrbitalSource source;
  NormalizationConstants constants;
  ForcingGrid grid;
};

// Loads and normalizes the configured orbital source and precomputes the
// forcing grid over [time_floor, 0]. Returns null when no source is
// configured, which is valid only for unforced runs.
std::unique_ptr<OrbitalData> load_orbital_data(const RunConfig& config);

}  // namespace paleo

#endif
