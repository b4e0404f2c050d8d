#ifndef PALEO_SUMMARIES_HPP
#define PALEO_SUMMARIES_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "paleo/archive.hpp"
#include "paleo/rng.hpp"
#include "paleo/smc.hpp"

namespace paleo {

struct HdrConfig {
  double mass = 0.95;
  int grid_points = 512;
  double range_pad_bw = 3.0;  // grid spans sample range +- this many bandwidths

  void validate() const;
};

struct HdrSegment {
  double lo = 0.0;
  double hi = 0.0;
};

struct HdrInterval {
  std::size_t slice = 0;  // 1-based when slice-bound, 0 otherwise
  std::string quantity;   // age | x1 | x2
  double mass = 0.0;
  std::vector<HdrSegment> segments;  // disjoint, ordered
  bool point = false;                // all samples identical
  double bandwidth = 0.0;

  bool contains(double value) const;
  double total_width() const;
};

// Weighted Gaussian-kernel density on a fixed grid; the HDR is the set of
// highest-density grid cells accumulated to the target mass, merged into
// intervals. Weights need not be pre-normalized.
HdrInterval hdr(std::span<const double> values, std::span<const double> weights,
                const HdrConfig& config = {});

// One whole-particle chronology draw with its climate path and outer weight.
struct ChronologySample {
  double weight = 0.0;
  std::vector<double> T, x1, x2;
};

std::vector<ChronologySample> to_chronology_samples(const std::vector<PosteriorDraw>& particles);

struct AgeSdProfile {
  std::vector<double> per_slice;  // weighted sd of the age -T_m, kyr
  double mean = 0.0;
};

AgeSdProfile age_sd_profile(const std::vector<ChronologySample>& particles);

struct BayesFactor {
  double log_bf = 0.0;  // log_z1 - log_z2
  double log_z1 = 0.0;
  double log_z2 = 0.0;
  double mc_error = 0.0;
  std::string interpretation;  // Kass-Raftery band on 2 ln BF
};

// Requires both estimates to come from the same record bytes.
BayesFactor bayes_factor(const EvidenceEstimate& ev1, const EvidenceEstimate& ev2);

std::string kass_raftery_band(double log_bf);

// Weighted whole-particle resampling; slices are never mixed across particles.
std::vector<Chronology> sample_chronologies(const std::vector<ChronologySample>& particles,
                                            std::size_t k, RngStream& rng);

// Artifact files. CSV numbers are written with round-trip precision.
void write_posterior_csv(const std::string& path, const SmcResult& result);
void write_chronology_csv(const std::string& path,
                          const std::vector<ChronologySample>& particles);
std::vector<ChronologySample> read_chronology_csv(const std::string& path);
void write_evidence_json(const std::string& path, const EvidenceEstimate& ev,
                         double wall_seconds);
EvidenceEstimate read_evidence_json(const std::string& path);
void write_hdr_csv(const std::string& path, const std::vector<HdrInterval>& intervals);
void write_age_sd_csv(const std::string& path, const AgeSdProfile& profile);
void write_bayes_factor_json(const std::string& path, const BayesFactor& bf);

}  // namespace paleo

#endif
