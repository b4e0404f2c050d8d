#ifndef PALEO_SMC_HPP
#define PALEO_SMC_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "paleo/archive.hpp"
#include "paleo/climate.hpp"
#include "paleo/observation.hpp"
#include "paleo/orbital.hpp"
#include "paleo/params.hpp"
#include "paleo/prior.hpp"

namespace paleo {

struct SmcSettings {
  int n_theta = 1024;
  int n_x = 1024;
  double ess_threshold = 0.5;  // rejuvenate when theta-ESS < threshold * n_theta
  int mcmc_moves = 3;          // K Metropolis moves per rejuvenation
  IntegratorConfig integrator;
  StateInit state_init;
  int propose_retry_cap = 100;
  double time_floor = kOrbitalWindowStart;  // chronologies live in (time_floor, 0)
  int workers = 1;
  std::uint64_t seed = 1;
  // Override of the per-slot RNG identities (size n_theta). Defaults to slot
  // index; exists so exchangeability of the theta cloud can be exercised.
  std::vector<std::uint64_t> slot_keys;

  void validate() const;
};

struct EvidenceEstimate {
  double log_z = 0.0;
  std::vector<double> increments;  // one per slice, log_z = their sum
  int n_theta = 0;
  int n_x = 0;
  std::uint64_t seed = 0;
  int rejuvenation_count = 0;
  // within-run delta-method proxy; replicate seeds give the real error bar
  double mc_error_rough = 0.0;
  std::uint64_t record_hash = 0;
  std::string model;  // forced | unforced
  std::string mode;   // joint | fixed-chronology
};

double ess(std::span<const double> weights);
std::vector<std::uint32_t> systematic_resample(std::span<const double> weights, RngStream& rng);

struct FilterContext {
  const CoreRecord* record = nullptr;
  const ForcingGrid* forcing = nullptr;           // null for unforced runs
  const Chronology* fixed_chronology = nullptr;   // null for joint runs
  const SmcSettings* settings = nullptr;
};

// Inner particle filter over (T, X) paths for one parameter draw. History is
// append-only and slice-major so resampling never copies paths; full paths are
// recovered by backtracking ancestor indices. All draws come from streams
// keyed by (seed, key_prefix..., slice), which makes runs bit-reproducible
// regardless of scheduling.
class PathFilter {
 public:
  PathFilter(const FilterContext& ctx, const ModelParams& params, std::uint64_t seed,
             std::span<const std::uint64_t> key_prefix);

  double init();                 // processes slice 0, returns its log increment
  double step(std::size_t slice);  // slices must be processed in order
  void run_through(std::size_t slice_count);  // init + steps up to slice_count-1

  double log_lik() const { return log_lik_; }
  const std::vector<double>& increments() const { return incr_; }
  std::size_t slices_done() const { return done_; }
  bool collapsed() const { return collapsed_; }
  const ModelParams& params() const { return params_; }

  std::span<const double> weights() const { return w_; }
  std::span<const double> times() const;
  std::span<const double> x1s() const;
  double inner_ess() const;

  void sample_path(RngStream& rng, std::vector<double>& T, std::vector<double>& x1,
                   std::vector<double>& x2) const;

 private:
  ClimateState integrate_state(ClimateState state, double t_end, RngStream& rng);
  RngStream stream_for(std::size_t slice) const;

  FilterContext ctx_;
  ModelParams params_;
  std::vector<double> corrected_;  // per-slice corrected depths (joint mode)
  std::size_t n_x_ = 0;
  std::size_t done_ = 0;
  std::vector<double> hist_T_, hist_x1_, hist_x2_;
  std::vector<std::uint32_t> hist_anc_;
  std::vector<double> log_w_;  // cumulative unnormalized
  std::vector<double> w_;      // normalized
  std::vector<double> scratch_;
  double log_lik_ = 0.0;
  std::vector<double> incr_;
  bool collapsed_ = false;
  std::uint64_t seed_ = 0;
  std::array<std::uint64_t, 6> prefix_{};
  std::size_t prefix_len_ = 0;
};

struct PosteriorDraw {
  ModelParams params;
  double weight = 0.0;
  std::vector<double> T, x1, x2;  // one path drawn from the inner smoother
};

struct ProgressEvent {
  std::size_t slice = 0;  // 1-based
  double theta_ess = 0.0;
  double log_z = 0.0;
  int rejuvenations = 0;
};

using ProgressFn = std::function<void(const ProgressEvent&)>;

struct SmcResult {
  std::vector<PosteriorDraw> particles;  // live particles, weights normalized
  EvidenceEstimate evidence;
  std::vector<int> active;  // inferred parameter indices
  double mean_accept = 0.0;
  std::vector<double> theta_ess_trace;
};

SmcResult smc2_run(const CoreRecord& record, const Prior& prior, ModelVariant variant,
                   const SmcSettings& settings, const ForcingGrid* forcing,
                   const ProgressFn& progress = {});

// Same engine with T clamped to a known chronology; the age-model terms and
// the archive parameter block drop out.
SmcResult fixed_chronology_run(const CoreRecord& record, const Chronology& chronology,
                               const Prior& prior, ModelVariant variant,
                               const SmcSettings& settings, const ForcingGrid* forcing,
                               const ProgressFn& progress = {});

}  // namespace paleo

#endif
