#ifndef PALEO_PRIOR_HPP
#define PALEO_PRIOR_HPP

#include <array>
#include <span>
#include <string>

#include "paleo/params.hpp"
#include "paleo/rng.hpp"

namespace paleo {

enum class DistKind { uniform, gaussian, log_gaussian, truncated_gaussian };

// One marginal prior. Bounded kinds map to the real line through a logit,
// positive kinds through a log, so Metropolis moves can act unconstrained.
struct DistSpec {
  DistKind kind = DistKind::gaussian;
  double mean = 0.0;  // location (log-space location for log_gaussian)
  double sd = 1.0;
  double lo = 0.0;  // bounds for uniform / truncated_gaussian
  double hi = 1.0;

  void validate() const;
  double sample(RngStream& rng) const;
  double logpdf(double x) const;
  bool in_support(double x) const;
  double to_unconstrained(double x) const;
  double from_unconstrained(double u) const;
  // log |dx/du| at u, so that density_u(u) = logpdf(x(u)) + this
  double log_jacobian(double u) const;
};

std::string_view dist_kind_name(DistKind kind);
DistKind parse_dist_kind(std::string_view name);

class Prior {
 public:
  Prior();  // built-in weakly-informative defaults
  explicit Prior(std::array<DistSpec, kNumParams> specs);

  const DistSpec& spec(int index) const { return specs_[index]; }
  void set_spec(int index, const DistSpec& spec);

  // Inactive components keep their values from `base`.
  ModelParams sample(std::span<const int> active, const ModelParams& base, RngStream& rng) const;
  double logpdf(const ModelParams& params, std::span<const int> active) const;

  std::vector<double> to_unconstrained(const ModelParams& params,
                                       std::span<const int> active) const;
  ModelParams from_unconstrained(std::span<const double> u, std::span<const int> active,
                                 const ModelParams& base) const;
  // log prior density of theta(u) plus the transform Jacobian
  double log_density_unconstrained(std::span<const double> u, std::span<const int> active) const;

 private:
  std::array<DistSpec, kNumParams> specs_;
};

ModelParams default_base_params();

}  // namespace paleo

#endif
