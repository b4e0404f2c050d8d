#include "paleo/cli.hpp"

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "paleo/config.hpp"
#include "paleo/simulate.hpp"
#include "paleo/smc.hpp"
#include "paleo/summaries.hpp"
#include "paleo/util.hpp"

namespace paleo {

namespace {

std::string iso_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

struct Manifest {
  std::string command;
  std::string started;
  std::uint64_t seed = 0;
  std::string config_path;
  std::uint64_t config_hash = 0;
  std::vector<std::pair<std::string, std::uint64_t>> inputs;
  std::vector<std::string> outputs;
  std::string resolved_config_json;
};

void write_manifest(const std::string& out_dir, const Manifest& m) {
  nlohmann::json j;
  j["command"] = m.command;
  j["tool_version"] = kToolVersion;
  j["seed"] = m.seed;
  if (!m.config_path.empty())
    j["config"] = {{"path", m.config_path}, {"hash", hex64(m.config_hash)}};
  else
    j["config"] = nullptr;
  nlohmann::json inputs = nlohmann::json::array();
  for (const auto& [path, hash] : m.inputs)
    inputs.push_back({{"path", path}, {"hash", hex64(hash)}});
  j["inputs"] = inputs;
  j["outputs"] = m.outputs;
  j["started"] = m.started;
  j["finished"] = iso_now();
  if (!m.resolved_config_json.empty())
    j["resolved_config"] = nlohmann::json::parse(m.resolved_config_json);
  else
    j["resolved_config"] = nullptr;
  atomic_write_file(out_dir + "/manifest.json", j.dump(2) + "\n");
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
}

struct CommonFlags {
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> model;
  std::optional<int> workers;
};

RunConfig load_with_overrides(const CommonFlags& flags) {
  RunConfig config = load_run_config(flags.config_path);
  if (flags.out_dir) config.out_dir = *flags.out_dir;
  if (flags.seed) {
    config.smc.seed = *flags.seed;
    config.simulate.seed = *flags.seed;
  }
  if (flags.model) config.model.variant = parse_variant(*flags.model);
  if (flags.workers) {
    if (*flags.workers < 1) throw ConfigError("--workers must be at least 1");
    config.smc.workers = *flags.workers;
  }
  config.resolved_json = resolve_run_config_json(config);
  return config;
}

void print_notices(const std::vector<std::string>& notices) {
  for (const std::string& notice : notices) std::cerr << "note: " << notice << "\n";
}

int cmd_simulate(const CommonFlags& flags) {
  const std::string started = iso_now();
  RunConfig config = load_with_overrides(flags);
  ensure_out_dir(config.out_dir);

  std::unique_ptr<OrbitalData> orbital = load_orbital_data(config);
  if (!config.simulate.true_params.weights.all_zero() && !orbital)
    throw ConfigError("simulate.truth has nonzero forcing weights; configure model.orbital_series");
  const SimulationResult result =
      simulate_core(config.simulate, orbital ? &orbital->grid : nullptr);

  const std::string core_path = config.out_dir + "/core.csv";
  const std::string truth_path = config.out_dir + "/truth.csv";
  const std::string params_path = config.out_dir + "/truth_params.json";
  write_core(result.record, core_path);
  write_truth_csv(truth_path, result);
  nlohmann::json truth;
  for (int i = 0; i < kNumParams; ++i)
    truth[std::string(param_names()[i])] = get_param(result.truth.params, i);
  atomic_write_file(params_path, truth.dump(2) + "\n");

  Manifest manifest;
  manifest.command = "simulate";
  manifest.started = started;
  manifest.seed = config.simulate.seed;
  manifest.config_path = config.config_path;
  manifest.config_hash = config.config_hash;
  manifest.outputs = {core_path, truth_path, params_path};
  manifest.resolved_config_json = config.resolved_json;
  write_manifest(config.out_dir, manifest);

  std::cout << "simulated " << result.record.slices.size() << " slices into " << core_path
            << "\n";
  return 0;
}

int cmd_infer(const std::string& core_path, const CommonFlags& flags) {
  const std::string started = iso_now();
  RunConfig config = load_with_overrides(flags);
  ensure_out_dir(config.out_dir);

  std::vector<std::string> notices;
  const CoreRecord record = load_core(core_path, &notices);
  print_notices(notices);
  std::unique_ptr<OrbitalData> orbital = load_orbital_data(config);
  if (config.model.variant == ModelVariant::forced && !orbital)
    throw ConfigError("forced runs need model.orbital_series or model.orbital_table");

  std::ofstream progress(config.out_dir + "/progress.log", std::ios::trunc);
  const std::size_t m_total = record.slices.size();
  const int every = config.progress_every;
  const ProgressFn on_progress = [&](const ProgressEvent& event) {
    if (event.slice % static_cast<std::size_t>(every) != 0 && event.slice != m_total) return;
    progress << "slice=" << event.slice << " theta_ess=" << event.theta_ess
             << " log_Z=" << event.log_z << " rejuvenations=" << event.rejuvenations
             << std::endl;
  };

  const auto t0 = std::chrono::steady_clock::now();
  const SmcResult result = smc2_run(record, config.prior, config.model.variant, config.smc,
                                    orbital ? &orbital->grid : nullptr, on_progress);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const std::string posterior_path = config.out_dir + "/posterior.csv";
  const std::string chronology_path = config.out_dir + "/chronology.csv";
  const std::string evidence_path = config.out_dir + "/evidence.json";
  write_posterior_csv(posterior_path, result);
  write_chronology_csv(chronology_path, to_chronology_samples(result.particles));
  write_evidence_json(evidence_path, result.evidence, wall);

  Manifest manifest;
  manifest.command = "infer";
  manifest.started = started;
  manifest.seed = config.smc.seed;
  manifest.config_path = config.config_path;
  manifest.config_hash = config.config_hash;
  manifest.inputs.emplace_back(core_path, record.content_hash);
  manifest.outputs = {posterior_path, chronology_path, evidence_path};
  manifest.resolved_config_json = config.resolved_json;
  write_manifest(config.out_dir, manifest);

  std::cout << "log_Z = " << format_double(result.evidence.log_z) << " ("
            << result.evidence.model << ", " << result.particles.size()
            << " live particles, " << result.evidence.rejuvenation_count
            << " rejuvenations)\n";
  return 0;
}

int cmd_compare(const std::string& path1, const std::string& path2, const std::string& out_dir) {
  const std::string started = iso_now();
  const EvidenceEstimate ev1 = read_evidence_json(path1);
  const EvidenceEstimate ev2 = read_evidence_json(path2);
  const BayesFactor bf = bayes_factor(ev1, ev2);

  ensure_out_dir(out_dir);
  const std::string report_path = out_dir + "/bayes_factor.json";
  write_bayes_factor_json(report_path, bf);

  Manifest manifest;
  manifest.command = "compare";
  manifest.started = started;
  manifest.inputs.emplace_back(path1, fnv1a64(read_file(path1)));
  manifest.inputs.emplace_back(path2, fnv1a64(read_file(path2)));
  manifest.outputs = {report_path};
  write_manifest(out_dir, manifest);

  std::cout << "log BF (" << ev1.model << "/" << ev1.mode << " vs " << ev2.model << "/"
            << ev2.mode << ") = " << format_double(bf.log_bf) << "\n"
            << "2 ln BF = " << format_double(2.0 * bf.log_bf) << " (" << bf.interpretation
            << ")\n";
  return 0;
}

int cmd_ablation(const std::string& core_path, const std::string& chronology_path, int draws,
                 const CommonFlags& flags) {
  if (draws < 2) throw ConfigError("ablation needs at least two chronology draws");
  const std::string started = iso_now();
  RunConfig config = load_with_overrides(flags);
  ensure_out_dir(config.out_dir);

  std::vector<std::string> notices;
  const CoreRecord record = load_core(core_path, &notices);
  print_notices(notices);
  std::unique_ptr<OrbitalData> orbital = load_orbital_data(config);
  if (!orbital)
    throw ConfigError("ablation needs model.orbital_series or model.orbital_table for the "
                      "forced arm");

  const std::vector<ChronologySample> particles = read_chronology_csv(chronology_path);
  RngStream draw_rng(rng_key(config.smc.seed, {rng_tag::summary, 0xab1a}));
  const std::vector<Chronology> chronologies =
      sample_chronologies(particles, static_cast<std::size_t>(draws), draw_rng);

  std::ostringstream table;
  table << "draw,log_Z_forced,log_Z_unforced,log_bf\n";
  for (int d = 0; d < draws; ++d) {
    const Chronology& chronology = chronologies[d];
    const SmcResult forced = fixed_chronology_run(record, chronology, config.prior,
                                                  ModelVariant::forced, config.smc,
                                                  &orbital->grid);
    const SmcResult unforced = fixed_chronology_run(record, chronology, config.prior,
                                                    ModelVariant::unforced, config.smc, nullptr);
    const double log_bf = forced.evidence.log_z - unforced.evidence.log_z;
    table << (d + 1) << "," << format_double(forced.evidence.log_z) << ","
          << format_double(unforced.evidence.log_z) << "," << format_double(log_bf) << "\n";
    std::cout << "draw " << (d + 1) << ": log BF = " << format_double(log_bf) << "\n";
  }
  const std::string table_path = config.out_dir + "/ablation.csv";
  atomic_write_file(table_path, table.str());

  Manifest manifest;
  manifest.command = "ablation";
  manifest.started = started;
  manifest.seed = config.smc.seed;
  manifest.config_path = config.config_path;
  manifest.config_hash = config.config_hash;
  manifest.inputs.emplace_back(core_path, record.content_hash);
  manifest.inputs.emplace_back(chronology_path, fnv1a64(read_file(chronology_path)));
  manifest.outputs = {table_path};
  manifest.resolved_config_json = config.resolved_json;
  write_manifest(config.out_dir, manifest);
  return 0;
}

int cmd_summarize(const std::string& chronology_path, const std::string& out_dir, int workers) {
  if (workers < 1) throw ConfigError("--workers must be at least 1");
  const std::string started = iso_now();
  const std::vector<ChronologySample> particles = read_chronology_csv(chronology_path);
  ensure_out_dir(out_dir);

  const std::size_t m_total = particles[0].T.size();
  const std::size_t n = particles.size();
  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i) weights[i] = particles[i].weight;

  const HdrConfig hdr_config;
  std::vector<HdrInterval> intervals(3 * m_total);
  parallel_for(m_total, workers, [&](std::size_t m) {
    std::vector<double> column(n);
    const char* quantities[3] = {"age", "x1", "x2"};
    for (int q = 0; q < 3; ++q) {
      for (std::size_t i = 0; i < n; ++i)
        column[i] = q == 0   ? -particles[i].T[m]
                    : q == 1 ? particles[i].x1[m]
                             : particles[i].x2[m];
      HdrInterval interval = hdr(column, weights, hdr_config);
      interval.slice = m + 1;
      interval.quantity = quantities[q];
      intervals[3 * m + q] = std::move(interval);
    }
  });
  for (const HdrInterval& interval : intervals)
    if (interval.point)
      std::cerr << "warning: slice " << interval.slice << " " << interval.quantity
                << " samples are all identical; HDR is a point\n";
  const AgeSdProfile profile = age_sd_profile(particles);

  const std::string hdr_path = out_dir + "/hdr.csv";
  const std::string age_sd_path = out_dir + "/age_sd.csv";
  const std::string summary_path = out_dir + "/summary.json";
  write_hdr_csv(hdr_path, intervals);
  write_age_sd_csv(age_sd_path, profile);
  nlohmann::json summary;
  summary["mean_age_sd_kyr"] = profile.mean;
  summary["hdr"] = {{"mass", hdr_config.mass},
                    {"kernel", "gaussian"},
                    {"bandwidth_rule", "silverman"},
                    {"grid_points", hdr_config.grid_points},
                    {"range_pad_bw", hdr_config.range_pad_bw}};
  summary["particles"] = n;
  summary["slices"] = m_total;
  atomic_write_file(summary_path, summary.dump(2) + "\n");

  Manifest manifest;
  manifest.command = "summarize";
  manifest.started = started;
  manifest.inputs.emplace_back(chronology_path, fnv1a64(read_file(chronology_path)));
  manifest.outputs = {hdr_path, age_sd_path, summary_path};
  write_manifest(out_dir, manifest);

  std::cout << "mean age sd = " << format_double(profile.mean) << " kyr over " << m_total
            << " slices\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Joint Bayesian chronology and climate inference for sediment cores"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  CommonFlags flags;
  std::string core_path, chronology_path, evidence1, evidence2;
  std::string plain_out = "out";
  int draws = 0;
  int summarize_workers = 1;

  CLI::App* simulate = app.add_subcommand("simulate", "Generate a synthetic core with truth files");
  simulate->add_option("--config", flags.config_path, "Run configuration JSON")->required();
  simulate->add_option("--out", flags.out_dir, "Output directory");
  simulate->add_option("--seed", flags.seed, "RNG seed override");

  CLI::App* infer = app.add_subcommand("infer", "Joint posterior and evidence for one core");
  infer->add_option("core", core_path, "Core CSV")->required();
  infer->add_option("--config", flags.config_path, "Run configuration JSON")->required();
  infer->add_option("--out", flags.out_dir, "Output directory");
  infer->add_option("--seed", flags.seed, "RNG seed override");
  infer->add_option("--model", flags.model, "Model variant: forced or unforced");
  infer->add_option("--workers", flags.workers, "Worker thread cap");

  CLI::App* compare = app.add_subcommand("compare", "Bayes factor from two evidence files");
  compare->add_option("evidence1", evidence1, "Evidence JSON (numerator)")->required();
  compare->add_option("evidence2", evidence2, "Evidence JSON (denominator)")->required();
  compare->add_option("--out", plain_out, "Output directory");

  CLI::App* ablation = app.add_subcommand(
      "ablation", "Fixed-chronology evidence table across posterior chronology draws");
  ablation->add_option("core", core_path, "Core CSV")->required();
  ablation->add_option("--chronologies", chronology_path, "Chronology draws CSV from a joint run")
      ->required();
  ablation->add_option("--draws", draws, "Number of chronology draws")->required();
  ablation->add_option("--config", flags.config_path, "Run configuration JSON")->required();
  ablation->add_option("--out", flags.out_dir, "Output directory");
  ablation->add_option("--seed", flags.seed, "RNG seed override");
  ablation->add_option("--workers", flags.workers, "Worker thread cap");

  CLI::App* summarize =
      app.add_subcommand("summarize", "HDR intervals and age-sd profile from chronology draws");
  summarize->add_option("chronology", chronology_path, "Chronology draws CSV")->required();
  summarize->add_option("--out", plain_out, "Output directory");
  summarize->add_option("--workers", summarize_workers, "Worker thread cap");

  try {
    app.parse(argc, argv);
    if (simulate->parsed()) return cmd_simulate(flags);
    if (infer->parsed()) return cmd_infer(core_path, flags);
    if (compare->parsed()) return cmd_compare(evidence1, evidence2, plain_out);
    if (ablation->parsed()) return cmd_ablation(core_path, chronology_path, draws, flags);
    if (summarize->parsed()) return cmd_summarize(chronology_path, plain_out, summarize_workers);
    return 2;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const CollapseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const ConsistencyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const OrderingError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace paleo
