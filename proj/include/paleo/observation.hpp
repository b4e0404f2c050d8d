#ifndef PALEO_OBSERVATION_HPP
#define PALEO_OBSERVATION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "paleo/errors.hpp"

namespace paleo {

struct CalibrationParams {
  double d_offset = 0.0;  // permil
  double c_scale = 0.0;   // permil per unit ice volume
  double sigma_y = 0.0;   // permil

  void validate() const;
};

struct CoreSlice {
  double depth_m = 0.0;
  double d18o = 0.0;
};

struct TiePoint {
  std::size_t slice = 0;  // 0-based index into slices (slice 0 is deepest, m = 1)
  double age_mean = 0.0;  // kyr
  double age_sd = 0.0;
};

struct CoreRecord {
  std::string name;
  std::vector<CoreSlice> slices;  // deepest first
  std::vector<TiePoint> tie_points;
  std::uint64_t content_hash = 0;  // fingerprint of the source file bytes

  void validate() const;
  bool has_tie_at(std::size_t slice) const;
  const TiePoint* tie_at(std::size_t slice) const;
};

double obs_loglik(double y, double x1, const CalibrationParams& calib);

// Gaussian density of the reported age -T around the tie-point estimate.
double tiepoint_loglik(double T, double age_mean, double age_sd);

// Core CSV: header `depth_m,d18O`, one slice per line, `#` comments, optional
// `#tiepoint depth_m age_kyr sd_kyr` and `#core name` metadata lines. Rows may
// arrive shallow-first (reordered with a notice). Slices deeper than the
// deepest tie point are dropped so that tie point anchors slice m = 1.
CoreRecord load_core(const std::string& path, std::vector<std::string>* notices = nullptr);

// Canonical file image of a record; write_core emits exactly these bytes, so
// hashing them reproduces the content hash a later load_core will compute.
std::string serialize_core(const CoreRecord& record);

void write_core(const CoreRecord& record, const std::string& path);

}  // namespace paleo

#endif
