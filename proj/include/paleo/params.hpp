#ifndef PALEO_PARAMS_HPP
#define PALEO_PARAMS_HPP

#include <array>
#include <string_view>
#include <vector>

#include "paleo/archive.hpp"
#include "paleo/climate.hpp"
#include "paleo/observation.hpp"
#include "paleo/orbital.hpp"

namespace paleo {

inline constexpr int kNumParams = 17;

struct ModelParams {
  DynamicsParams dynamics;
  ForcingWeights weights;
  CalibrationParams calib;
  ArchiveParams archive;

  void validate() const;
};

// Canonical flat order used by priors, posterior CSVs, and configs.
const std::array<std::string_view, kNumParams>& param_names();
int param_index(std::string_view name);  // -1 when unknown
double get_param(const ModelParams& params, int index);
void set_param(ModelParams& params, int index, double value);

enum class ModelVariant { forced, unforced };

ModelVariant parse_variant(std::string_view name);
std::string_view variant_name(ModelVariant variant);

// Indices of the parameters inferred under a variant. The unforced variant
// pins the forcing weights at zero; fixed-chronology runs drop the archive
// block because the age model no longer enters the likelihood.
std::vector<int> active_params(ModelVariant variant, bool fixed_chronology);

// Initial distribution of (x1, x2) at the first slice; independent Gaussians.
struct StateInit {
  double mean_x1 = 0.0;
  double sd_x1 = 1.5;
  double mean_x2 = 0.0;
  double sd_x2 = 1.5;

  void validate() const;
};

}  // namespace paleo

#endif
