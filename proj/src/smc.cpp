#include "paleo/smc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "paleo/archive.hpp"
#include "paleo/util.hpp"

namespace paleo {

void SmcSettings::validate() const {
  if (n_theta < 1) throw ConfigError("n_theta must be at least 1");
  if (n_x < 1) throw ConfigError("n_x must be at least 1");
  if (!(ess_threshold >= 0.0 && ess_threshold <= 1.0))
    throw ConfigError("ess_threshold must lie in [0, 1]");
  if (mcmc_moves < 0) throw ConfigError("mcmc_moves must be non-negative");
  integrator.validate();
  state_init.validate();
  if (propose_retry_cap < 1) throw ConfigError("propose_retry_cap must be positive");
  if (!(time_floor < 0.0)) throw ConfigError("time_floor must be negative");
  if (workers < 1) throw ConfigError("workers must be at least 1");
  if (!slot_keys.empty() && slot_keys.size() != static_cast<std::size_t>(n_theta))
    throw ConfigError("slot_keys length must equal n_theta");
}

double ess(std::span<const double> weights) { return effective_sample_size(weights); }

std::vector<std::uint32_t> systematic_resample(std::span<const double> weights, RngStream& rng) {
  const std::size_t n = weights.size();
  std::vector<std::uint32_t> ancestors(n);
  const double u0 = rng.uniform();
  std::size_t i = 0;
  double cum = weights.empty() ? 0.0 : weights[0];
  for (std::size_t k = 0; k < n; ++k) {
    const double p = (static_cast<double>(k) + u0) / static_cast<double>(n);
    while (cum < p && i + 1 < n) cum += weights[++i];
    ancestors[k] = static_cast<std::uint32_t>(i);
  }
  return ancestors;
}

PathFilter::PathFilter(const FilterContext& ctx, const ModelParams& params, std::uint64_t seed,
                       std::span<const std::uint64_t> key_prefix)
    : ctx_(ctx), params_(params), seed_(seed) {
  if (!ctx_.record || !ctx_.settings) throw ConfigError("filter context incomplete");
  if (key_prefix.size() > prefix_.size()) throw ConfigError("rng key prefix too long");
  std::copy(key_prefix.begin(), key_prefix.end(), prefix_.begin());
  prefix_len_ = key_prefix.size();
  if (!params_.weights.all_zero() && !ctx_.forcing)
    throw ConfigError("nonzero forcing weights but no forcing grid");

  const CoreRecord& rec = *ctx_.record;
  const std::size_t m_total = rec.slices.size();
  n_x_ = static_cast<std::size_t>(ctx_.settings->n_x);
  if (ctx_.fixed_chronology) {
    ctx_.fixed_chronology->validate();
    if (ctx_.fixed_chronology->times.size() != m_total)
      throw ConsistencyError("chronology length does not match the record");
  } else {
    if (!rec.has_tie_at(0))
      throw ConsistencyError("record lacks a tie point at the deepest slice");
    std::vector<double> depths;
    depths.reserve(m_total);
    for (const CoreSlice& slice : rec.slices) depths.push_back(slice.depth_m);
    corrected_ = make_depth_grid(std::move(depths), params_.archive).corrected_depths;
  }
  hist_T_.reserve(m_total * n_x_);
  hist_x1_.reserve(m_total * n_x_);
  hist_x2_.reserve(m_total * n_x_);
  hist_anc_.reserve(m_total * n_x_);
  log_w_.resize(n_x_);
  w_.resize(n_x_);
  scratch_.resize(n_x_);
  incr_.reserve(m_total);
}

RngStream PathFilter::stream_for(std::size_t slice) const {
  std::array<std::uint64_t, 7> ids;
  std::copy(prefix_.begin(), prefix_.begin() + prefix_len_, ids.begin());
  ids[prefix_len_] = slice;
  return RngStream(rng_key(seed_, std::span<const std::uint64_t>(ids.data(), prefix_len_ + 1)));
}

namespace {

template <typename F>
ClimateState integrate_forced(ClimateState state, double t_end, const DynamicsParams& dyn,
                              F&& forcing_at, const IntegratorConfig& config, RngStream& rng) {
  return integrate(state, t_end, dyn, forcing_at, config, rng);
}

}  // namespace

double PathFilter::init() {
  if (done_ != 0) throw OrderingError("filter already initialized");
  const CoreRecord& rec = *ctx_.record;
  const SmcSettings& st = *ctx_.settings;
  RngStream rng = stream_for(0);
  const double y0 = rec.slices[0].d18o;
  for (std::size_t j = 0; j < n_x_; ++j) {
    double T = 0.0;
    bool degenerate = false;
    if (ctx_.fixed_chronology) {
      T = ctx_.fixed_chronology->times[0];
    } else {
      const TiePoint* tie = rec.tie_at(0);
      int attempt = 0;
      for (; attempt < st.propose_retry_cap; ++attempt) {
        T = -(tie->age_mean + tie->age_sd * rng.normal());
        if (T < 0.0 && T > st.time_floor) break;
      }
      if (attempt == st.propose_retry_cap) {
        degenerate = true;
        T = 0.5 * st.time_floor;
      }
    }
    const double x1 = st.state_init.mean_x1 + st.state_init.sd_x1 * rng.normal();
    const double x2 = st.state_init.mean_x2 + st.state_init.sd_x2 * rng.normal();
    log_w_[j] = degenerate ? kNegInf : obs_loglik(y0, x1, params_.calib);
    hist_T_.push_back(T);
    hist_x1_.push_back(x1);
    hist_x2_.push_back(x2);
    hist_anc_.push_back(static_cast<std::uint32_t>(j));
  }
  double incr = log_mean_exp(log_w_);
  if (ctx_.fixed_chronology)
    if (const TiePoint* tie = rec.tie_at(0))
      incr += tiepoint_loglik(ctx_.fixed_chronology->times[0], tie->age_mean, tie->age_sd);
  std::copy(log_w_.begin(), log_w_.end(), w_.begin());
  if (!normalize_log_weights(w_)) {
    collapsed_ = true;
    throw CollapseError("inner filter degenerate", 1);
  }
  log_lik_ = incr;
  incr_.push_back(incr);
  done_ = 1;
  return incr;
}

double PathFilter::step(std::size_t slice) {
  if (collapsed_) throw CollapseError("stepping a collapsed filter", static_cast<int>(done_));
  if (done_ == 0) throw OrderingError("filter not initialized");
  if (slice != done_) throw OrderingError("slices must be processed in order");
  const CoreRecord& rec = *ctx_.record;
  if (slice >= rec.slices.size()) throw OrderingError("slice index beyond the record");
  const SmcSettings& st = *ctx_.settings;
  RngStream rng = stream_for(slice);

  const bool resample = inner_ess() < 0.5 * static_cast<double>(n_x_);
  std::vector<std::uint32_t> ancestors;
  if (resample) ancestors = systematic_resample(w_, rng);

  const std::size_t base_prev = (slice - 1) * n_x_;
  const double y = rec.slices[slice].d18o;
  const TiePoint* tie = rec.tie_at(slice);
  const double log_uniform = -std::log(static_cast<double>(n_x_));

  for (std::size_t j = 0; j < n_x_; ++j) {
    const std::uint32_t parent = resample ? ancestors[j] : static_cast<std::uint32_t>(j);
    const double T_prev = hist_T_[base_prev + parent];
    const double x1p = hist_x1_[base_prev + parent];
    const double x2p = hist_x2_[base_prev + parent];
    double T, x1n, x2n, omega;
    if (ctx_.fixed_chronology) {
      T = ctx_.fixed_chronology->times[slice];
      ClimateState s = integrate_state({x1p, x2p, T_prev}, T, rng);
      x1n = s.x1;
      x2n = s.x2;
      omega = obs_loglik(y, s.x1, params_.calib);
    } else {
      const AgeProposal prop = propose_age(T_prev, corrected_[slice], corrected_[slice - 1],
                                           params_.archive, rng, st.propose_retry_cap);
      T = prop.T;
      if (prop.degenerate) {
        x1n = x1p;
        x2n = x2p;
        omega = kNegInf;
      } else {
        ClimateState s = integrate_state({x1p, x2p, T_prev}, T, rng);
        x1n = s.x1;
        x2n = s.x2;
        omega = obs_loglik(y, s.x1, params_.calib) +
                age_transition_logpdf(T, T_prev, corrected_[slice], corrected_[slice - 1],
                                      params_.archive) -
                prop.log_q;
        if (tie) omega += tiepoint_loglik(T, tie->age_mean, tie->age_sd);
      }
    }
    if (!std::isfinite(omega)) omega = kNegInf;
    if (resample) {
      scratch_[j] = log_uniform + omega;
      log_w_[j] = omega;
    } else {
      scratch_[j] = w_[j] > 0.0 ? std::log(w_[j]) + omega : kNegInf;
      log_w_[j] += omega;
    }
    hist_T_.push_back(T);
    hist_x1_.push_back(x1n);
    hist_x2_.push_back(x2n);
    hist_anc_.push_back(parent);
  }

  double incr = log_sum_exp(scratch_);
  if (ctx_.fixed_chronology && tie)
    incr += tiepoint_loglik(ctx_.fixed_chronology->times[slice], tie->age_mean, tie->age_sd);
  std::copy(log_w_.begin(), log_w_.end(), w_.begin());
  if (!normalize_log_weights(w_)) {
    collapsed_ = true;
    throw CollapseError("particle filter collapsed", static_cast<int>(slice) + 1);
  }
  log_lik_ += incr;
  incr_.push_back(incr);
  done_ = slice + 1;
  return incr;
}

void PathFilter::run_through(std::size_t slice_count) {
  if (done_ == 0) init();
  while (done_ < slice_count) step(done_);
}

ClimateState PathFilter::integrate_state(ClimateState state, double t_end, RngStream& rng) {
  const IntegratorConfig& config = ctx_.settings->integrator;
  if (ctx_.forcing && !params_.weights.all_zero()) {
    const ForcingGrid* grid = ctx_.forcing;
    const ForcingWeights weights = params_.weights;
    return integrate_forced(
        state, t_end, params_.dynamics,
        [grid, weights](double t) { return grid->value(t, weights); }, config, rng);
  }
  return integrate_forced(
      state, t_end, params_.dynamics, [](double) { return 0.0; }, config, rng);
}

std::span<const double> PathFilter::times() const {
  if (done_ == 0) return {};
  return {hist_T_.data() + (done_ - 1) * n_x_, n_x_};
}

std::span<const double> PathFilter::x1s() const {
  if (done_ == 0) return {};
  return {hist_x1_.data() + (done_ - 1) * n_x_, n_x_};
}

double PathFilter::inner_ess() const { return effective_sample_size(w_); }

void PathFilter::sample_path(RngStream& rng, std::vector<double>& T, std::vector<double>& x1,
                             std::vector<double>& x2) const {
  if (done_ == 0) throw OrderingError("no path to sample from an unstarted filter");
  const double u = rng.uniform();
  double cum = 0.0;
  std::size_t idx = n_x_ - 1;
  for (std::size_t j = 0; j < n_x_; ++j) {
    cum += w_[j];
    if (u <= cum) {
      idx = j;
      break;
    }
  }
  T.resize(done_);
  x1.resize(done_);
  x2.resize(done_);
  for (std::size_t s = done_; s-- > 0;) {
    const std::size_t base = s * n_x_;
    T[s] = hist_T_[base + idx];
    x1[s] = hist_x1_[base + idx];
    x2[s] = hist_x2_[base + idx];
    idx = hist_anc_[base + idx];
  }
}

namespace {

struct OuterDriver {
  const CoreRecord& record;
  const Prior& prior;
  ModelVariant variant;
  const SmcSettings& settings;
  const ForcingGrid* forcing;
  const Chronology* fixed;
  const ProgressFn& progress;

  SmcResult run() const {
    settings.validate();
    record.validate();
    const std::size_t m_total = record.slices.size();
    if (fixed) {
      fixed->validate();
      if (fixed->times.size() != m_total)
        throw ConsistencyError("chronology length does not match the record");
    }
    if (variant == ModelVariant::forced && !forcing)
      throw ConfigError("forced model requires an orbital forcing grid");
    if (forcing && variant == ModelVariant::forced &&
        (forcing->t_start() > settings.time_floor || forcing->t_end() < 0.0))
      throw ConfigError("forcing grid does not span the chronology window");

    const std::size_t n = static_cast<std::size_t>(settings.n_theta);
    const std::vector<int> active = active_params(variant, fixed != nullptr);
    const ModelParams base = default_base_params();
    std::vector<std::uint64_t> keys = settings.slot_keys;
    if (keys.empty()) {
      keys.resize(n);
      std::iota(keys.begin(), keys.end(), 0);
    }
    const ForcingGrid* grid = variant == ModelVariant::forced ? forcing : nullptr;
    const FilterContext ctx{&record, grid, fixed, &settings};

    std::vector<ModelParams> theta(n);
    std::vector<std::unique_ptr<PathFilter>> filters(n);
    std::vector<double> log_w(n), w(n), incr(n), scratch(n);
    std::vector<char> dead(n, 0);

    parallel_for(n, settings.workers, [&](std::size_t i) {
      RngStream prior_rng(rng_key(settings.seed, {rng_tag::prior, keys[i]}));
      theta[i] = prior.sample(active, base, prior_rng);
      const std::array<std::uint64_t, 2> prefix = {rng_tag::filter, keys[i]};
      filters[i] = std::make_unique<PathFilter>(ctx, theta[i], settings.seed, prefix);
      try {
        incr[i] = filters[i]->init();
      } catch (const CollapseError&) {
        incr[i] = kNegInf;
        dead[i] = 1;
      }
    });

    SmcResult result;
    result.active = active;
    EvidenceEstimate& ev = result.evidence;
    ev.n_theta = settings.n_theta;
    ev.n_x = settings.n_x;
    ev.seed = settings.seed;
    ev.record_hash = record.content_hash;
    ev.model = std::string(variant_name(variant));
    ev.mode = fixed ? "fixed-chronology" : "joint";

    double outer = log_mean_exp(incr);
    if (outer == kNegInf) throw CollapseError("all theta particles degenerate", 1);
    ev.log_z = outer;
    ev.increments.push_back(outer);
    double mc_var = 0.0;
    {
      double acc = 0.0;
      const double inv_n = 1.0 / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double r = incr[i] == kNegInf ? 0.0 : std::exp(incr[i] - outer);
        acc += inv_n * inv_n * (r - 1.0) * (r - 1.0);
      }
      mc_var += acc;
    }
    for (std::size_t i = 0; i < n; ++i) log_w[i] = incr[i];
    std::copy(log_w.begin(), log_w.end(), w.begin());
    normalize_log_weights(w);
    result.theta_ess_trace.push_back(ess(w));
    if (progress) progress({1, ess(w), ev.log_z, 0});

    int rejuvenations = 0;
    long accepted = 0, attempted = 0;
    std::vector<int> accept_slot(n, 0);

    for (std::size_t slice = 1; slice < m_total; ++slice) {
      if (n > 1 && settings.mcmc_moves > 0 &&
          ess(w) < settings.ess_threshold * static_cast<double>(n)) {
        rejuvenate(slice, ctx, active, base, keys, theta, filters, w, accept_slot,
                   rejuvenations);
        attempted += static_cast<long>(n) * settings.mcmc_moves;
        for (std::size_t i = 0; i < n; ++i) accepted += accept_slot[i];
        std::fill(accept_slot.begin(), accept_slot.end(), 0);
        std::fill(log_w.begin(), log_w.end(), 0.0);
        std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(n));
        std::fill(dead.begin(), dead.end(), 0);
        ++rejuvenations;
      }

      parallel_for(n, settings.workers, [&](std::size_t i) {
        if (dead[i]) {
          incr[i] = kNegInf;
          return;
        }
        try {
          incr[i] = filters[i]->step(slice);
        } catch (const CollapseError&) {
          incr[i] = kNegInf;
          dead[i] = 1;
        }
      });

      for (std::size_t i = 0; i < n; ++i)
        scratch[i] = w[i] > 0.0 ? std::log(w[i]) + incr[i] : kNegInf;
      outer = log_sum_exp(scratch);
      if (outer == kNegInf)
        throw CollapseError("all theta particles collapsed", static_cast<int>(slice) + 1);
      ev.log_z += outer;
      ev.increments.push_back(outer);
      {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (w[i] <= 0.0) continue;
          const double r = incr[i] == kNegInf ? 0.0 : std::exp(incr[i] - outer);
          acc += w[i] * w[i] * (r - 1.0) * (r - 1.0);
        }
        mc_var += acc;
      }
      for (std::size_t i = 0; i < n; ++i) log_w[i] += incr[i];
      std::copy(log_w.begin(), log_w.end(), w.begin());
      normalize_log_weights(w);
      result.theta_ess_trace.push_back(ess(w));
      if (progress) progress({slice + 1, ess(w), ev.log_z, rejuvenations});
    }

    ev.rejuvenation_count = rejuvenations;
    ev.mc_error_rough = std::sqrt(mc_var);
    result.mean_accept =
        attempted > 0 ? static_cast<double>(accepted) / static_cast<double>(attempted) : 0.0;

    std::vector<PosteriorDraw> draws(n);
    parallel_for(n, settings.workers, [&](std::size_t i) {
      if (dead[i]) return;
      RngStream rng(rng_key(settings.seed, {rng_tag::summary, keys[i]}));
      draws[i].params = theta[i];
      draws[i].weight = w[i];
      filters[i]->sample_path(rng, draws[i].T, draws[i].x1, draws[i].x2);
    });
    result.particles.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      if (!dead[i]) result.particles.push_back(std::move(draws[i]));
    return result;
  }

  void rejuvenate(std::size_t slices_done, const FilterContext& ctx,
                  const std::vector<int>& active, const ModelParams& base,
                  const std::vector<std::uint64_t>& keys, std::vector<ModelParams>& theta,
                  std::vector<std::unique_ptr<PathFilter>>& filters, std::vector<double>& w,
                  std::vector<int>& accept_slot, int rejuvenation_index) const {
    const std::size_t n = theta.size();
    const std::size_t d = active.size();

    // random-walk scale from the weighted cloud in unconstrained space
    std::vector<double> mean(d, 0.0), var(d, 0.0), step(d, 0.0);
    std::vector<std::vector<double>> u_all(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (w[i] <= 0.0) continue;
      u_all[i] = prior.to_unconstrained(theta[i], active);
      for (std::size_t k = 0; k < d; ++k) mean[k] += w[i] * u_all[i][k];
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (w[i] <= 0.0) continue;
      for (std::size_t k = 0; k < d; ++k) {
        const double r = u_all[i][k] - mean[k];
        var[k] += w[i] * r * r;
      }
    }
    const double scale = 2.38 / std::sqrt(static_cast<double>(d));
    for (std::size_t k = 0; k < d; ++k) {
      double sd = std::sqrt(var[k]);
      if (!(sd > 1e-6 * (1.0 + std::abs(mean[k])))) sd = 1e-6 * (1.0 + std::abs(mean[k]));
      step[k] = scale * sd;
    }

    RngStream resample_rng(
        rng_key(settings.seed, {rng_tag::resample_theta,
                                static_cast<std::uint64_t>(rejuvenation_index)}));
    const std::vector<std::uint32_t> ancestors = systematic_resample(w, resample_rng);
    std::vector<ModelParams> new_theta(n);
    std::vector<std::unique_ptr<PathFilter>> new_filters(n);
    std::vector<int> first_slot(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint32_t a = ancestors[i];
      new_theta[i] = theta[a];
      if (first_slot[a] < 0) {
        new_filters[i] = std::move(filters[a]);
        first_slot[a] = static_cast<int>(i);
      } else {
        new_filters[i] = std::make_unique<PathFilter>(*new_filters[first_slot[a]]);
      }
    }
    theta = std::move(new_theta);
    filters = std::move(new_filters);

    const std::uint64_t r_id = static_cast<std::uint64_t>(rejuvenation_index);
    parallel_for(n, settings.workers, [&](std::size_t i) {
      for (int k = 0; k < settings.mcmc_moves; ++k) {
        RngStream move_rng(rng_key(
            settings.seed,
            {rng_tag::rejuvenate, r_id, keys[i], static_cast<std::uint64_t>(k), ~0ULL}));
        std::vector<double> u = prior.to_unconstrained(theta[i], active);
        std::vector<double> u_new(d);
        for (std::size_t kk = 0; kk < d; ++kk) u_new[kk] = u[kk] + step[kk] * move_rng.normal();
        const ModelParams proposal = prior.from_unconstrained(u_new, active, base);
        const double lp_old = prior.log_density_unconstrained(u, active);
        const double lp_new = prior.log_density_unconstrained(u_new, active);
        const std::array<std::uint64_t, 4> prefix = {rng_tag::rejuvenate, r_id, keys[i],
                                                     static_cast<std::uint64_t>(k)};
        PathFilter fresh(ctx, proposal, settings.seed, prefix);
        double log_lik_new = kNegInf;
        try {
          fresh.run_through(slices_done);
          log_lik_new = fresh.log_lik();
        } catch (const CollapseError&) {
          log_lik_new = kNegInf;
        }
        const double log_alpha = (log_lik_new + lp_new) - (filters[i]->log_lik() + lp_old);
        if (std::log(move_rng.uniform()) < log_alpha) {
          theta[i] = proposal;
          *filters[i] = std::move(fresh);
          ++accept_slot[i];
        }
      }
    });
  }

};

}  // namespace

SmcResult smc2_run(const CoreRecord& record, const Prior& prior, ModelVariant variant,
                   const SmcSettings& settings, const ForcingGrid* forcing,
                   const ProgressFn& progress) {
  const OuterDriver driver{record, prior, variant, settings, forcing, nullptr, progress};
  return driver.run();
}

SmcResult fixed_chronology_run(const CoreRecord& record, const Chronology& chronology,
                               const Prior& prior, ModelVariant variant,
                               const SmcSettings& settings, const ForcingGrid* forcing,
                               const ProgressFn& progress) {
  const OuterDriver driver{record, prior, variant, settings, forcing, &chronology, progress};
  return driver.run();
}

}  // namespace paleo
