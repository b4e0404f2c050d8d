#include "paleo/config.hpp"

#include <cmath>
#include <set>
#include <string>

#include "json.hpp"
#include "paleo/util.hpp"

namespace paleo {

namespace {

using nlohmann::json;

[[noreturn]] void bad_key(const std::string& section, const std::string& key) {
  throw ConfigError("unknown key '" + key + "' in config section '" + section + "'");
}

void check_keys(const json& j, const std::string& section, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError("config section '" + section + "' must be an object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) bad_key(section, item.key());
}

double get_number(const json& j, const std::string& section, const std::string& key,
                  double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError("config key '" + section + "." + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError("config key '" + section + "." + key + "' is not finite");
  return x;
}

int get_int(const json& j, const std::string& section, const std::string& key, int fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer())
    throw ConfigError("config key '" + section + "." + key + "' must be an integer");
  return v.get<int>();
}

std::uint64_t get_u64(const json& j, const std::string& section, const std::string& key,
                      std::uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer())
    throw ConfigError("config key '" + section + "." + key + "' must be a non-negative integer");
  if (!v.is_number_unsigned() && v.get<long long>() < 0)
    throw ConfigError("config key '" + section + "." + key + "' must be a non-negative integer");
  return v.get<std::uint64_t>();
}

std::string get_string(const json& j, const std::string& section, const std::string& key,
                       const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_string())
    throw ConfigError("config key '" + section + "." + key + "' must be a string");
  return v.get<std::string>();
}

std::string dir_of(const std::string& path) {
  const std::size_t cut = path.find_last_of("/\\");
  return cut == std::string::npos ? std::string(".") : path.substr(0, cut);
}

std::string resolve_path(const std::string& base_dir, const std::string& path) {
  if (path.empty() || path.front() == '/') return path;
  return base_dir + "/" + path;
}

DistSpec parse_dist(const json& j, const std::string& name) {
  const std::string section = "priors." + name;
  const std::string kind = get_string(j, section, "dist", "");
  if (kind.empty()) throw ConfigError("prior for '" + name + "' is missing 'dist'");
  DistSpec spec;
  if (kind == "uniform") {
    check_keys(j, section, {"dist", "lo", "hi"});
    spec.kind = DistKind::uniform;
    spec.lo = get_number(j, section, "lo", 0.0);
    spec.hi = get_number(j, section, "hi", 1.0);
    if (!j.contains("lo") || !j.contains("hi"))
      throw ConfigError("uniform prior for '" + name + "' needs lo and hi");
  } else if (kind == "gaussian") {
    check_keys(j, section, {"dist", "mean", "sd"});
    spec.kind = DistKind::gaussian;
    spec.mean = get_number(j, section, "mean", 0.0);
    spec.sd = get_number(j, section, "sd", 1.0);
  } else if (kind == "log-gaussian") {
    check_keys(j, section, {"dist", "log_mean", "log_sd"});
    spec.kind = DistKind::log_gaussian;
    spec.mean = get_number(j, section, "log_mean", 0.0);
    spec.sd = get_number(j, section, "log_sd", 1.0);
  } else if (kind == "truncated-gaussian") {
    check_keys(j, section, {"dist", "mean", "sd", "lo", "hi"});
    spec.kind = DistKind::truncated_gaussian;
    spec.mean = get_number(j, section, "mean", 0.0);
    spec.sd = get_number(j, section, "sd", 1.0);
    spec.lo = get_number(j, section, "lo", 0.0);
    spec.hi = get_number(j, section, "hi", 1.0);
  } else {
    throw ConfigError("unknown prior kind '" + kind + "' for '" + name + "'");
  }
  spec.validate();
  return spec;
}

json dist_to_json(const DistSpec& spec) {
  json j;
  j["dist"] = std::string(dist_kind_name(spec.kind));
  switch (spec.kind) {
    case DistKind::uniform:
      j["lo"] = spec.lo;
      j["hi"] = spec.hi;
      break;
    case DistKind::gaussian:
      j["mean"] = spec.mean;
      j["sd"] = spec.sd;
      break;
    case DistKind::log_gaussian:
      j["log_mean"] = spec.mean;
      j["log_sd"] = spec.sd;
      break;
    case DistKind::truncated_gaussian:
      j["mean"] = spec.mean;
      j["sd"] = spec.sd;
      j["lo"] = spec.lo;
      j["hi"] = spec.hi;
      break;
  }
  return j;
}

void parse_model_section(const json& j, const std::string& config_dir, ModelSection& model) {
  check_keys(j, "model",
             {"variant", "orbital_series", "orbital_table", "time_floor", "forcing_grid_step",
              "normalization", "state_init"});
  const std::string variant = get_string(j, "model", "variant", "forced");
  model.variant = parse_variant(variant);
  model.orbital_series_path =
      resolve_path(config_dir, get_string(j, "model", "orbital_series", ""));
  model.orbital_table_path = resolve_path(config_dir, get_string(j, "model", "orbital_table", ""));
  if (!model.orbital_series_path.empty() && !model.orbital_table_path.empty())
    throw ConfigError("configure either model.orbital_series or model.orbital_table, not both");
  model.time_floor = get_number(j, "model", "time_floor", model.time_floor);
  model.forcing_grid_step = get_number(j, "model", "forcing_grid_step", model.forcing_grid_step);
  if (!(model.forcing_grid_step > 0.0))
    throw ConfigError("model.forcing_grid_step must be positive");
  if (j.contains("normalization")) {
    const json& n = j.at("normalization");
    check_keys(n, "model.normalization", {"window_start", "window_end", "sample_step"});
    model.normalization.window_start =
        get_number(n, "model.normalization", "window_start", model.normalization.window_start);
    model.normalization.window_end =
        get_number(n, "model.normalization", "window_end", model.normalization.window_end);
    model.normalization.sample_step =
        get_number(n, "model.normalization", "sample_step", model.normalization.sample_step);
  }
  if (j.contains("state_init")) {
    const json& s = j.at("state_init");
    check_keys(s, "model.state_init", {"mean_x1", "sd_x1", "mean_x2", "sd_x2"});
    model.state_init.mean_x1 = get_number(s, "model.state_init", "mean_x1", 0.0);
    model.state_init.sd_x1 = get_number(s, "model.state_init", "sd_x1", 1.5);
    model.state_init.mean_x2 = get_number(s, "model.state_init", "mean_x2", 0.0);
    model.state_init.sd_x2 = get_number(s, "model.state_init", "sd_x2", 1.5);
  }
  model.state_init.validate();
}

void parse_smc_section(const json& j, SmcSettings& smc) {
  check_keys(j, "smc",
             {"n_theta", "n_x", "ess_threshold", "mcmc_moves", "max_step", "propose_retry_cap",
              "seed", "workers"});
  smc.n_theta = get_int(j, "smc", "n_theta", smc.n_theta);
  smc.n_x = get_int(j, "smc", "n_x", smc.n_x);
  smc.ess_threshold = get_number(j, "smc", "ess_threshold", smc.ess_threshold);
  smc.mcmc_moves = get_int(j, "smc", "mcmc_moves", smc.mcmc_moves);
  smc.integrator.max_step = get_number(j, "smc", "max_step", smc.integrator.max_step);
  smc.propose_retry_cap = get_int(j, "smc", "propose_retry_cap", smc.propose_retry_cap);
  smc.seed = get_u64(j, "smc", "seed", smc.seed);
  smc.workers = get_int(j, "smc", "workers", smc.workers);
}

void parse_simulate_section(const json& j, RunConfig& config) {
  check_keys(j, "simulate",
             {"core_length_m", "slice_spacing_m", "first_tiepoint_sd_kyr", "name", "seed",
              "retry_cap", "truth"});
  SimulationConfig& sim = config.simulate;
  sim.core_length_m = get_number(j, "simulate", "core_length_m", sim.core_length_m);
  sim.slice_spacing_m = get_number(j, "simulate", "slice_spacing_m", sim.slice_spacing_m);
  sim.first_tiepoint_sd_kyr =
      get_number(j, "simulate", "first_tiepoint_sd_kyr", sim.first_tiepoint_sd_kyr);
  sim.name = get_string(j, "simulate", "name", sim.name);
  sim.seed = get_u64(j, "simulate", "seed", sim.seed);
  sim.retry_cap = get_int(j, "simulate", "retry_cap", sim.retry_cap);
  if (j.contains("truth")) {
    const json& t = j.at("truth");
    if (!t.is_object()) throw ConfigError("simulate.truth must be an object");
    for (const auto& item : t.items()) {
      const int idx = param_index(item.key());
      if (idx < 0) bad_key("simulate.truth", item.key());
      set_param(sim.true_params, idx, get_number(t, "simulate.truth", item.key(), 0.0));
    }
  }
  config.has_simulate = true;
}

}  // namespace

RunConfig default_run_config() {
  RunConfig config;
  config.simulate.true_params = default_base_params();
  config.simulate.state_init = config.model.state_init;
  return config;
}

std::string resolve_run_config_json(const RunConfig& config) {
  json j;
  j["model"] = {
      {"variant", std::string(variant_name(config.model.variant))},
      {"orbital_series", config.model.orbital_series_path},
      {"orbital_table", config.model.orbital_table_path},
      {"time_floor", config.model.time_floor},
      {"forcing_grid_step", config.model.forcing_grid_step},
      {"normalization",
       {{"window_start", config.model.normalization.window_start},
        {"window_end", config.model.normalization.window_end},
        {"sample_step", config.model.normalization.sample_step}}},
      {"state_init",
       {{"mean_x1", config.model.state_init.mean_x1},
        {"sd_x1", config.model.state_init.sd_x1},
        {"mean_x2", config.model.state_init.mean_x2},
        {"sd_x2", config.model.state_init.sd_x2}}}};
  json priors;
  for (int i = 0; i < kNumParams; ++i)
    priors[std::string(param_names()[i])] = dist_to_json(config.prior.spec(i));
  j["priors"] = priors;
  j["smc"] = {{"n_theta", config.smc.n_theta},
              {"n_x", config.smc.n_x},
              {"ess_threshold", config.smc.ess_threshold},
              {"mcmc_moves", config.smc.mcmc_moves},
              {"max_step", config.smc.integrator.max_step},
              {"propose_retry_cap", config.smc.propose_retry_cap},
              {"seed", config.smc.seed},
              {"workers", config.smc.workers}};
  j["io"] = {{"out_dir", config.out_dir}, {"progress_every", config.progress_every}};
  if (config.has_simulate) {
    json truth;
    for (int i = 0; i < kNumParams; ++i)
      truth[std::string(param_names()[i])] = get_param(config.simulate.true_params, i);
    j["simulate"] = {{"core_length_m", config.simulate.core_length_m},
                     {"slice_spacing_m", config.simulate.slice_spacing_m},
                     {"first_tiepoint_sd_kyr", config.simulate.first_tiepoint_sd_kyr},
                     {"name", config.simulate.name},
                     {"seed", config.simulate.seed},
                     {"retry_cap", config.simulate.retry_cap},
                     {"truth", truth}};
  }
  return j.dump(2) + "\n";
}

RunConfig load_run_config(const std::string& path) {
  const std::string content = read_file(path);
  RunConfig config = default_run_config();
  config.config_path = path;
  config.config_hash = fnv1a64(content);

  json j;
  try {
    j = json::parse(content);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("cannot parse config ") + path + ": " + e.what());
  }
  check_keys(j, "(top level)", {"model", "priors", "smc", "io", "simulate"});
  const std::string config_dir = dir_of(path);

  if (j.contains("model")) parse_model_section(j.at("model"), config_dir, config.model);
  if (j.contains("priors")) {
    const json& p = j.at("priors");
    if (!p.is_object()) throw ConfigError("config section 'priors' must be an object");
    for (const auto& item : p.items()) {
      const int idx = param_index(item.key());
      if (idx < 0) bad_key("priors", item.key());
      config.prior.set_spec(idx, parse_dist(item.value(), item.key()));
    }
  }
  if (j.contains("smc")) parse_smc_section(j.at("smc"), config.smc);
  if (j.contains("io")) {
    const json& io = j.at("io");
    check_keys(io, "io", {"out_dir", "progress_every"});
    config.out_dir = get_string(io, "io", "out_dir", config.out_dir);
    config.progress_every = get_int(io, "io", "progress_every", config.progress_every);
    if (config.progress_every < 1) throw ConfigError("io.progress_every must be positive");
  }
  if (j.contains("simulate")) parse_simulate_section(j.at("simulate"), config);

  config.smc.time_floor = config.model.time_floor;
  config.smc.state_init = config.model.state_init;
  config.simulate.time_floor = config.model.time_floor;
  config.simulate.state_init = config.model.state_init;
  config.simulate.integrator = config.smc.integrator;
  config.smc.validate();
  config.resolved_json = resolve_run_config_json(config);
  return config;
}

std::unique_ptr<OrbitalData> load_orbital_data(const RunConfig& config) {
  const ModelSection& model = config.model;
  if (model.orbital_series_path.empty() && model.orbital_table_path.empty()) return nullptr;
  OrbitalSource source = model.orbital_series_path.empty()
                             ? OrbitalSource(load_tabulated_orbital(model.orbital_table_path))
                             : OrbitalSource(load_orbital_series(model.orbital_series_path));
  const NormalizationSettings& norm = model.normalization;
  if (source.t_min() > norm.window_start || source.t_max() < norm.window_end)
    throw ConfigError("orbital source does not cover the normalization window");
  if (source.t_min() > model.time_floor || source.t_max() < 0.0)
    throw ConfigError("orbital source does not cover the time window");
  NormalizationConstants constants =
      normalize_series(source, norm.window_start, norm.window_end, norm.sample_step);
  ForcingGrid grid(source, constants, model.time_floor, 0.0, model.forcing_grid_step);
  return std::make_unique<OrbitalData>(
      OrbitalData{std::move(source), constants, std::move(grid)});
}

}  // namespace paleo
