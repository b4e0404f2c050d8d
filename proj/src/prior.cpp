#include "paleo/prior.hpp"

#include <cmath>

#include "paleo/util.hpp"

namespace paleo {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double logit(double p) { return std::log(p) - std::log1p(-p); }

double sigmoid(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

// log sigmoid(u) + log sigmoid(-u), stable in both tails
double log_sigmoid_pair(double u) {
  const double a = std::abs(u);
  return -a - 2.0 * std::log1p(std::exp(-a));
}

constexpr int kTruncRejectCap = 100000;

}  // namespace

void DistSpec::validate() const {
  if (!std::isfinite(mean) || !std::isfinite(sd) || !std::isfinite(lo) || !std::isfinite(hi))
    throw ConfigError("non-finite prior spec field");
  switch (kind) {
    case DistKind::uniform:
      if (!(lo < hi)) throw ConfigError("uniform prior needs lo < hi");
      break;
    case DistKind::gaussian:
    case DistKind::log_gaussian:
      if (!(sd > 0.0)) throw ConfigError("prior sd must be positive");
      break;
    case DistKind::truncated_gaussian:
      if (!(sd > 0.0)) throw ConfigError("prior sd must be positive");
      if (!(lo < hi)) throw ConfigError("truncated-gaussian prior needs lo < hi");
      if (normal_cdf((hi - mean) / sd) - normal_cdf((lo - mean) / sd) < 1e-12)
        throw ConfigError("truncated-gaussian prior has negligible mass in (lo, hi)");
      break;
  }
}

double DistSpec::sample(RngStream& rng) const {
  switch (kind) {
    case DistKind::uniform:
      return rng.uniform(lo, hi);
    case DistKind::gaussian:
      return mean + sd * rng.normal();
    case DistKind::log_gaussian:
      return std::exp(mean + sd * rng.normal());
    case DistKind::truncated_gaussian:
      for (int i = 0; i < kTruncRejectCap; ++i) {
        const double x = mean + sd * rng.normal();
        if (x > lo && x < hi) return x;
      }
      throw ConfigError("truncated-gaussian prior rejection cap exhausted");
  }
  throw ConfigError("unreachable prior kind");
}

double DistSpec::logpdf(double x) const {
  if (!in_support(x)) return kNegInf;
  switch (kind) {
    case DistKind::uniform:
      return -std::log(hi - lo);
    case DistKind::gaussian:
      return normal_logpdf(x, mean, sd);
    case DistKind::log_gaussian:
      return normal_logpdf(std::log(x), mean, sd) - std::log(x);
    case DistKind::truncated_gaussian: {
      const double mass = normal_cdf((hi - mean) / sd) - normal_cdf((lo - mean) / sd);
      return normal_logpdf(x, mean, sd) - std::log(mass);
    }
  }
  throw ConfigError("unreachable prior kind");
}

bool DistSpec::in_support(double x) const {
  if (!std::isfinite(x)) return false;
  switch (kind) {
    case DistKind::uniform:
    case DistKind::truncated_gaussian:
      return x > lo && x < hi;
    case DistKind::gaussian:
      return true;
    case DistKind::log_gaussian:
      return x > 0.0;
  }
  return false;
}

double DistSpec::to_unconstrained(double x) const {
  switch (kind) {
    case DistKind::uniform:
    case DistKind::truncated_gaussian:
      return logit((x - lo) / (hi - lo));
    case DistKind::gaussian:
      return x;
    case DistKind::log_gaussian:
      return std::log(x);
  }
  throw ConfigError("unreachable prior kind");
}

double DistSpec::from_unconstrained(double u) const {
  switch (kind) {
    case DistKind::uniform:
    case DistKind::truncated_gaussian:
      return lo + (hi - lo) * sigmoid(u);
    case DistKind::gaussian:
      return u;
    case DistKind::log_gaussian:
      return std::exp(u);
  }
  throw ConfigError("unreachable prior kind");
}

double DistSpec::log_jacobian(double u) const {
  switch (kind) {
    case DistKind::uniform:
    case DistKind::truncated_gaussian:
      return std::log(hi - lo) + log_sigmoid_pair(u);
    case DistKind::gaussian:
      return 0.0;
    case DistKind::log_gaussian:
      return u;
  }
  throw ConfigError("unreachable prior kind");
}

std::string_view dist_kind_name(DistKind kind) {
  switch (kind) {
    case DistKind::uniform: return "uniform";
    case DistKind::gaussian: return "gaussian";
    case DistKind::log_gaussian: return "log-gaussian";
    case DistKind::truncated_gaussian: return "truncated-gaussian";
  }
  return "?";
}

DistKind parse_dist_kind(std::string_view name) {
  if (name == "uniform") return DistKind::uniform;
  if (name == "gaussian") return DistKind::gaussian;
  if (name == "log-gaussian") return DistKind::log_gaussian;
  if (name == "truncated-gaussian") return DistKind::truncated_gaussian;
  throw ConfigError("unknown prior kind '" + std::string(name) + "'");
}

namespace {

DistSpec gaussian_spec(double mean, double sd) {
  DistSpec s;
  s.kind = DistKind::gaussian;
  s.mean = mean;
  s.sd = sd;
  return s;
}

DistSpec log_gaussian_spec(double log_mean, double log_sd) {
  DistSpec s;
  s.kind = DistKind::log_gaussian;
  s.mean = log_mean;
  s.sd = log_sd;
  return s;
}

DistSpec truncated_spec(double mean, double sd, double lo, double hi) {
  DistSpec s;
  s.kind = DistKind::truncated_gaussian;
  s.mean = mean;
  s.sd = sd;
  s.lo = lo;
  s.hi = hi;
  return s;
}

// Weakly-informative defaults spanning plausible magnitudes for a late-
// Pleistocene benthic core; overridable per parameter from the run config.
std::array<DistSpec, kNumParams> default_specs() {
  std::array<DistSpec, kNumParams> specs;
  specs[0] = gaussian_spec(0.0, 0.5);                    // beta0
  specs[1] = gaussian_spec(0.0, 0.5);                    // beta1
  specs[2] = log_gaussian_spec(0.0, 0.5);                // beta2
  specs[3] = log_gaussian_spec(std::log(0.2), 0.7);      // delta
  specs[4] = log_gaussian_spec(0.0, 0.7);                // alpha
  specs[5] = log_gaussian_spec(std::log(0.3), 0.7);      // sigma1
  specs[6] = log_gaussian_spec(std::log(0.3), 0.7);      // sigma2
  specs[7] = gaussian_spec(0.0, 0.5);                    // gamma_p
  specs[8] = gaussian_spec(0.0, 0.5);                    // gamma_c
  specs[9] = gaussian_spec(0.0, 0.5);                    // gamma_e
  specs[10] = gaussian_spec(4.0, 0.5);                   // d18o_offset
  specs[11] = log_gaussian_spec(0.0, 0.5);               // d18o_scale
  specs[12] = log_gaussian_spec(std::log(0.25), 0.5);    // noise_sd
  specs[13] = log_gaussian_spec(std::log(0.04), 0.5);    // acc_rate
  specs[14] = log_gaussian_spec(std::log(0.05), 0.7);    // acc_vol
  specs[15] = log_gaussian_spec(std::log(0.002), 1.0);   // comp_grad
  specs[16] = truncated_spec(0.5, 0.25, 0.0, 0.95);      // porosity
  return specs;
}

}  // namespace

Prior::Prior() : specs_(default_specs()) {}

Prior::Prior(std::array<DistSpec, kNumParams> specs) : specs_(specs) {
  for (const DistSpec& s : specs_) s.validate();
}

void Prior::set_spec(int index, const DistSpec& spec) {
  if (index < 0 || index >= kNumParams) throw ConfigError("prior index out of range");
  spec.validate();
  specs_[index] = spec;
}

ModelParams Prior::sample(std::span<const int> active, const ModelParams& base,
                          RngStream& rng) const {
  ModelParams params = base;
  for (int i : active) set_param(params, i, specs_[i].sample(rng));
  return params;
}

double Prior::logpdf(const ModelParams& params, std::span<const int> active) const {
  double acc = 0.0;
  for (int i : active) acc += specs_[i].logpdf(get_param(params, i));
  return acc;
}

std::vector<double> Prior::to_unconstrained(const ModelParams& params,
                                            std::span<const int> active) const {
  std::vector<double> u;
  u.reserve(active.size());
  for (int i : active) u.push_back(specs_[i].to_unconstrained(get_param(params, i)));
  return u;
}

ModelParams Prior::from_unconstrained(std::span<const double> u, std::span<const int> active,
                                      const ModelParams& base) const {
  if (u.size() != active.size()) throw ConfigError("unconstrained vector length mismatch");
  ModelParams params = base;
  for (std::size_t k = 0; k < active.size(); ++k)
    set_param(params, active[k], specs_[active[k]].from_unconstrained(u[k]));
  return params;
}

double Prior::log_density_unconstrained(std::span<const double> u,
                                        std::span<const int> active) const {
  if (u.size() != active.size()) throw ConfigError("unconstrained vector length mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < active.size(); ++k) {
    const DistSpec& spec = specs_[active[k]];
    acc += spec.logpdf(spec.from_unconstrained(u[k])) + spec.log_jacobian(u[k]);
  }
  return acc;
}

ModelParams default_base_params() {
  ModelParams params;
  params.dynamics = {0.2, 0.2, 1.0, 0.15, 1.0, 0.3, 0.3};
  params.weights = {0.0, 0.0, 0.0};
  params.calib = {4.0, 1.0, 0.25};
  params.archive = {0.04, 0.05, 0.002, 0.5};
  return params;
}

}  // namespace paleo
