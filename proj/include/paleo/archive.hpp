#ifndef PALEO_ARCHIVE_HPP
#define PALEO_ARCHIVE_HPP

#include <vector>

#include "paleo/errors.hpp"
#include "paleo/rng.hpp"

namespace paleo {

struct ArchiveParams {
  double mu_s = 0.0;     // mean accumulation rate m/kyr
  double sigma_s = 0.0;  // accumulation volatility m/sqrt(kyr)
  double c = 0.0;        // compaction gradient 1/m
  double phi0 = 0.0;     // surface porosity

  void validate() const;
};

// Slice depths ordered deepest-first (m = 1..M, H_m strictly decreasing) with
// their compaction-corrected equivalents. Corrected depths depend only on the
// archive parameters, so the grid is rebuilt once per parameter draw.
struct DepthGrid {
  std::vector<double> depths;
  std::vector<double> corrected_depths;
};

DepthGrid make_depth_grid(std::vector<double> depths, const ArchiveParams& params);

struct Chronology {
  std::vector<double> times;  // T_1..T_M kyr, strictly increasing, < 0

  void validate() const;
};

double compact_correct(double depth, const ArchiveParams& params);

// Inverse Gaussian in (mean mu, shape lambda) parameterization.
double ig_logpdf(double x, double mean, double shape);
double ig_logcdf(double x, double mean, double shape);
double sample_ig(double mean, double shape, RngStream& rng);

// Density of T given only the corrected depth: -T ~ IG(Hc/mu_s, Hc^2/sigma_s^2).
double age_marginal_logpdf(double T, double corrected_depth, const ArchiveParams& params);

// p(T_m | T_prev) for adjacent slices, supported on (T_prev, 0); normalization
// is exact because the shared shape/mean^2 ratio makes the increment and
// marginal laws close under convolution.
double age_transition_logpdf(double T_m, double T_prev, double corrected_depth_m,
                             double corrected_depth_prev, const ArchiveParams& params);

struct AgeProposal {
  double T = 0.0;
  double log_q = 0.0;  // log density of the truncated proposal at T
  bool degenerate = false;
};

// Samples the untruncated IG age increment, retrying while T lands at or past
// the present. Exhausting the retry cap flags the particle degenerate (weight
// -inf downstream) with a placeholder T that preserves monotonicity.
AgeProposal propose_age(double T_prev, double corrected_depth_m, double corrected_depth_prev,
                        const ArchiveParams& params, RngStream& rng, int retry_cap = 100);

}  // namespace paleo

#endif
