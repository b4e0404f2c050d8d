#include "paleo/params.hpp"

#include <cmath>
#include <string>

namespace paleo {

void ModelParams::validate() const {
  dynamics.validate();
  if (!std::isfinite(weights.gamma_p) || !std::isfinite(weights.gamma_c) ||
      !std::isfinite(weights.gamma_e))
    throw ConfigError("non-finite forcing weight");
  calib.validate();
  archive.validate();
}

const std::array<std::string_view, kNumParams>& param_names() {
  static const std::array<std::string_view, kNumParams> names = {
      "beta0",    "beta1",      "beta2",      "delta",    "alpha",   "sigma1",
      "sigma2",   "gamma_p",    "gamma_c",    "gamma_e",  "d18o_offset",
      "d18o_scale", "noise_sd", "acc_rate",   "acc_vol",  "comp_grad", "porosity"};
  return names;
}

int param_index(std::string_view name) {
  const auto& names = param_names();
  for (int i = 0; i < kNumParams; ++i)
    if (names[i] == name) return i;
  return -1;
}

double get_param(const ModelParams& p, int index) {
  switch (index) {
    case 0: return p.dynamics.beta0;
    case 1: return p.dynamics.beta1;
    case 2: return p.dynamics.beta2;
    case 3: return p.dynamics.delta;
    case 4: return p.dynamics.alpha;
    case 5: return p.dynamics.sigma1;
    case 6: return p.dynamics.sigma2;
    case 7: return p.weights.gamma_p;
    case 8: return p.weights.gamma_c;
    case 9: return p.weights.gamma_e;
    case 10: return p.calib.d_offset;
    case 11: return p.calib.c_scale;
    case 12: return p.calib.sigma_y;
    case 13: return p.archive.mu_s;
    case 14: return p.archive.sigma_s;
    case 15: return p.archive.c;
    case 16: return p.archive.phi0;
    default: throw ConfigError("parameter index out of range");
  }
}

void set_param(ModelParams& p, int index, double value) {
  switch (index) {
    case 0: p.dynamics.beta0 = value; break;
    case 1: p.dynamics.beta1 = value; break;
    case 2: p.dynamics.beta2 = value; break;
    case 3: p.dynamics.delta = value; break;
    case 4: p.dynamics.alpha = value; break;
    case 5: p.dynamics.sigma1 = value; break;
    case 6: p.dynamics.sigma2 = value; break;
    case 7: p.weights.gamma_p = value; break;
    case 8: p.weights.gamma_c = value; break;
    case 9: p.weights.gamma_e = value; break;
    case 10: p.calib.d_offset = value; break;
    case 11: p.calib.c_scale = value; break;
    case 12: p.calib.sigma_y = value; break;
    case 13: p.archive.mu_s = value; break;
    case 14: p.archive.sigma_s = value; break;
    case 15: p.archive.c = value; break;
    case 16: p.archive.phi0 = value; break;
    default: throw ConfigError("parameter index out of range");
  }
}

ModelVariant parse_variant(std::string_view name) {
  if (name == "forced") return ModelVariant::forced;
  if (name == "unforced") return ModelVariant::unforced;
  throw ConfigError("unknown model variant '" + std::string(name) + "' (forced|unforced)");
}

std::string_view variant_name(ModelVariant variant) {
  return variant == ModelVariant::forced ? "forced" : "unforced";
}

std::vector<int> active_params(ModelVariant variant, bool fixed_chronology) {
  std::vector<int> active;
  for (int i = 0; i < kNumParams; ++i) {
    const bool is_gamma = i >= 7 && i <= 9;
    const bool is_archive = i >= 13;
    if (variant == ModelVariant::unforced && is_gamma) continue;
    if (fixed_chronology && is_archive) continue;
    active.push_back(i);
  }
  return active;
}

void StateInit::validate() const {
  if (!std::isfinite(mean_x1) || !std::isfinite(mean_x2))
    throw ConfigError("non-finite initial-state mean");
  if (!(sd_x1 >= 0.0) || !(sd_x2 >= 0.0))
    throw ConfigError("initial-state sds must be non-negative");
}

}  // namespace paleo
