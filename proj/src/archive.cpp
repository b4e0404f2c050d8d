#include "paleo/archive.hpp"

#include <array>
#include <cmath>

#include "paleo/util.hpp"

namespace paleo {

namespace {
constexpr double kHalfLog2Pi = 0.91893853320467274178;
}

void ArchiveParams::validate() const {
  if (!std::isfinite(mu_s) || !std::isfinite(sigma_s) || !std::isfinite(c) || !std::isfinite(phi0))
    throw ConfigError("non-finite archive parameter");
  if (!(mu_s > 0.0)) throw ConfigError("accumulation rate mu_s must be positive");
  if (!(sigma_s > 0.0)) throw ConfigError("accumulation volatility sigma_s must be positive");
  if (!(phi0 >= 0.0 && phi0 < 1.0)) throw ConfigError("surface porosity must lie in [0, 1)");
  if (c < 0.0) throw ConfigError("compaction gradient must be non-negative");
}

void Chronology::validate() const {
  if (times.empty()) throw OrderingError("chronology is empty");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || times[i] >= 0.0)
      throw OrderingError("chronology times must be finite and negative");
    if (i > 0 && !(times[i] > times[i - 1]))
      throw OrderingError("chronology times must be strictly increasing");
  }
}

double compact_correct(double depth, const ArchiveParams& params) {
  if (!(params.phi0 < 1.0)) throw ConfigError("surface porosity must lie in [0, 1)");
  if (depth < 0.0) throw DomainError("depth must be non-negative");
  return depth + params.c / (1.0 - params.phi0) * depth * depth;
}

DepthGrid make_depth_grid(std::vector<double> depths, const ArchiveParams& params) {
  if (depths.empty()) throw OrderingError("depth grid is empty");
  DepthGrid grid;
  grid.corrected_depths.reserve(depths.size());
  for (std::size_t i = 0; i < depths.size(); ++i) {
    if (!(depths[i] > 0.0)) throw OrderingError("slice depths must be positive");
    if (i > 0 && !(depths[i] < depths[i - 1]))
      throw OrderingError("slice depths must be strictly decreasing (deepest first)");
    grid.corrected_depths.push_back(compact_correct(depths[i], params));
  }
  grid.depths = std::move(depths);
  return grid;
}

double ig_logpdf(double x, double mean, double shape) {
  if (!(mean > 0.0) || !(shape > 0.0))
    throw DomainError("inverse-Gaussian mean and shape must be positive");
  if (!(x > 0.0)) return kNegInf;
  const double r = x - mean;
  return 0.5 * std::log(shape) - kHalfLog2Pi - 1.5 * std::log(x) -
         shape * r * r / (2.0 * mean * mean * x);
}

double ig_logcdf(double x, double mean, double shape) {
  if (!(mean > 0.0) || !(shape > 0.0))
    throw DomainError("inverse-Gaussian mean and shape must be positive");
  if (!(x > 0.0)) return kNegInf;
  if (std::isinf(x)) return 0.0;
  const double s = std::sqrt(shape / x);
  const std::array<double, 2> terms = {log_normal_cdf(s * (x / mean - 1.0)),
                                       2.0 * shape / mean + log_normal_cdf(-s * (x / mean + 1.0))};
  const double v = log_sum_exp(terms);
  return v > 0.0 ? 0.0 : v;
}

double sample_ig(double mean, double shape, RngStream& rng) {
  if (!(mean > 0.0) || !(shape > 0.0))
    throw DomainError("inverse-Gaussian mean and shape must be positive");
  const double y = rng.chisq1();
  const double w = mean * y / (2.0 * shape);
  // smaller root of the mean-y quadratic in the cancellation-free form
  const double x_small = mean / (1.0 + w + std::sqrt(w * (w + 2.0)));
  if (rng.uniform() <= mean / (mean + x_small)) return x_small;
  return mean * mean / x_small;
}

double age_marginal_logpdf(double T, double corrected_depth, const ArchiveParams& params) {
  if (!(corrected_depth > 0.0)) throw DomainError("corrected depth must be positive");
  if (T >= 0.0) return kNegInf;
  const double mean = corrected_depth / params.mu_s;
  const double shape = corrected_depth * corrected_depth / (params.sigma_s * params.sigma_s);
  return ig_logpdf(-T, mean, shape);
}

namespace {

void check_depth_pair(double corrected_depth_m, double corrected_depth_prev) {
  if (!(corrected_depth_m > 0.0) || !(corrected_depth_prev > corrected_depth_m))
    throw OrderingError("transition needs corrected depths with prev > current > 0");
}

}  // namespace

double age_transition_logpdf(double T_m, double T_prev, double corrected_depth_m,
                             double corrected_depth_prev, const ArchiveParams& params) {
  check_depth_pair(corrected_depth_m, corrected_depth_prev);
  if (!(T_prev < T_m) || T_m >= 0.0) return kNegInf;
  const double dh = corrected_depth_prev - corrected_depth_m;
  const double mean = dh / params.mu_s;
  const double shape = dh * dh / (params.sigma_s * params.sigma_s);
  return ig_logpdf(T_m - T_prev, mean, shape) +
         age_marginal_logpdf(T_m, corrected_depth_m, params) -
         age_marginal_logpdf(T_prev, corrected_depth_prev, params);
}

AgeProposal propose_age(double T_prev, double corrected_depth_m, double corrected_depth_prev,
                        const ArchiveParams& params, RngStream& rng, int retry_cap) {
  check_depth_pair(corrected_depth_m, corrected_depth_prev);
  if (!(T_prev < 0.0)) throw OrderingError("proposal anchor time must precede the present");
  const double dh = corrected_depth_prev - corrected_depth_m;
  const double mean = dh / params.mu_s;
  const double shape = dh * dh / (params.sigma_s * params.sigma_s);
  for (int attempt = 0; attempt < retry_cap; ++attempt) {
    const double tau = sample_ig(mean, shape, rng);
    const double T = T_prev + tau;
    if (T < 0.0) {
      AgeProposal out;
      out.T = T;
      out.log_q = ig_logpdf(tau, mean, shape) - ig_logcdf(-T_prev, mean, shape);
      return out;
    }
  }
  AgeProposal out;
  out.T = 0.5 * T_prev;  // keeps T_prev < T < 0 for downstream ordering checks
  out.log_q = 0.0;
  out.degenerate = true;
  return out;
}

}  // namespace paleo
