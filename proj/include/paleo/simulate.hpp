#ifndef PALEO_SIMULATE_HPP
#define PALEO_SIMULATE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "paleo/archive.hpp"
#include "paleo/climate.hpp"
#include "paleo/observation.hpp"
#include "paleo/orbital.hpp"
#include "paleo/params.hpp"

namespace paleo {

struct SimulationConfig {
  ModelParams true_params;
  double core_length_m = 32.0;
  double slice_spacing_m = 0.1;
  double first_tiepoint_sd_kyr = 2.0;
  std::uint64_t seed = 1;
  IntegratorConfig integrator;
  StateInit state_init;
  double time_floor = kOrbitalWindowStart;  // chronologies older than this are redrawn
  int retry_cap = 100;
  std::string name = "synthetic";

  void validate() const;
};

struct SimulationTruth {
  Chronology chronology;          // deepest-first, matches record order
  std::vector<double> x1, x2;     // climate path at the slice times
  std::vector<double> z;          // noise-free signal D + C * x1
  std::vector<double> y;          // observed values (z + measurement noise)
  ModelParams params;
};

struct SimulationResult {
  CoreRecord record;
  DepthGrid grid;
  SimulationTruth truth;
};

// Samples one synthetic core from the forward model. The depth grid has
// M = core_length/spacing + 1 slices centered at midpoints so every depth is
// strictly positive; ages accumulate by inverse-Gaussian increments from the
// present down to the deepest slice. Forcing may be null only when the true
// weights are all zero.
SimulationResult simulate_core(const SimulationConfig& config, const ForcingGrid* forcing);

// Truth table: slice,depth_m,T_kyr,x1,x2,z,y with slice counted 1-based from
// the deepest slice.
void write_truth_csv(const std::string& path, const SimulationResult& result);

}  // namespace paleo

#endif
