#include "paleo/summaries.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "paleo/params.hpp"
#include "paleo/util.hpp"

namespace paleo {

void HdrConfig::validate() const {
  if (!(mass > 0.0 && mass <= 1.0)) throw ConfigError("hdr mass must lie in (0, 1]");
  if (grid_points < 8) throw ConfigError("hdr grid needs at least 8 points");
  if (!(range_pad_bw > 0.0)) throw ConfigError("hdr range pad must be positive");
}

bool HdrInterval::contains(double value) const {
  for (const HdrSegment& seg : segments)
    if (value >= seg.lo && value <= seg.hi) return true;
  return false;
}

double HdrInterval::total_width() const {
  double w = 0.0;
  for (const HdrSegment& seg : segments) w += seg.hi - seg.lo;
  return w;
}

namespace {

std::vector<double> normalized_weights(std::span<const double> weights) {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("weights must be finite and >= 0");
    sum += w;
  }
  if (!(sum > 0.0)) throw ConfigError("weights sum to zero");
  std::vector<double> out(weights.begin(), weights.end());
  for (double& w : out) w /= sum;
  return out;
}

constexpr double kInvSqrt2Pi = 0.39894228040143267794;

}  // namespace

HdrInterval hdr(std::span<const double> values, std::span<const double> weights,
                const HdrConfig& config) {
  config.validate();
  if (values.empty() || values.size() != weights.size())
    throw ConfigError("hdr needs matching nonempty values and weights");
  const std::vector<double> w = normalized_weights(weights);

  HdrInterval out;
  out.mass = config.mass;
  // degeneracy means a one-point weighted support; an sd test would miss it
  // because summing identical values still rounds to a tiny positive variance
  double support_lo = kNegInf, support_hi = kNegInf;
  bool any = false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (w[i] == 0.0) continue;
    if (!any || values[i] < support_lo) support_lo = values[i];
    if (!any || values[i] > support_hi) support_hi = values[i];
    any = true;
  }
  if (support_lo == support_hi) {
    out.point = true;
    out.segments.push_back({support_lo, support_hi});
    return out;
  }
  const double sd = weighted_sd(values, w);
  const double iqr = weighted_quantile(values, w, 0.75) - weighted_quantile(values, w, 0.25);
  double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  const double n_eff = effective_sample_size(w);
  const double bw = 0.9 * spread * std::pow(n_eff, -0.2);
  out.bandwidth = bw;

  const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *min_it - config.range_pad_bw * bw;
  const double hi = *max_it + config.range_pad_bw * bw;
  const std::size_t g = static_cast<std::size_t>(config.grid_points);
  const double step = (hi - lo) / static_cast<double>(g - 1);

  std::vector<double> density(g, 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (w[i] == 0.0) continue;
    const double scale = w[i] * kInvSqrt2Pi / bw;
    for (std::size_t j = 0; j < g; ++j) {
      const double z = (lo + step * static_cast<double>(j) - values[i]) / bw;
      density[j] += scale * std::exp(-0.5 * z * z);
    }
  }

  double total = 0.0;
  for (double d : density) total += d * step;
  std::vector<std::size_t> order(g);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return density[a] > density[b]; });

  std::vector<char> selected(g, 0);
  const double target = config.mass * total;
  double cum = 0.0;
  for (std::size_t j : order) {
    if (cum >= target - 1e-12 * total) break;
    selected[j] = 1;
    cum += density[j] * step;
  }

  for (std::size_t j = 0; j < g;) {
    if (!selected[j]) {
      ++j;
      continue;
    }
    std::size_t k = j;
    while (k + 1 < g && selected[k + 1]) ++k;
    out.segments.push_back({lo + step * static_cast<double>(j),
                            lo + step * static_cast<double>(k)});
    j = k + 1;
  }
  return out;
}

std::vector<ChronologySample> to_chronology_samples(const std::vector<PosteriorDraw>& particles) {
  std::vector<ChronologySample> out;
  out.reserve(particles.size());
  for (const PosteriorDraw& p : particles) out.push_back({p.weight, p.T, p.x1, p.x2});
  return out;
}

AgeSdProfile age_sd_profile(const std::vector<ChronologySample>& particles) {
  if (particles.empty()) throw ConfigError("no particles to summarize");
  const std::size_t m_total = particles[0].T.size();
  if (m_total == 0) throw ConfigError("particles hold empty chronologies");
  std::vector<double> weights;
  weights.reserve(particles.size());
  for (const ChronologySample& p : particles) {
    if (p.T.size() != m_total) throw ConsistencyError("particles disagree on slice count");
    weights.push_back(p.weight);
  }
  const std::vector<double> w = normalized_weights(weights);

  AgeSdProfile profile;
  profile.per_slice.resize(m_total);
  std::vector<double> column(particles.size());
  for (std::size_t m = 0; m < m_total; ++m) {
    for (std::size_t i = 0; i < particles.size(); ++i) column[i] = -particles[i].T[m];
    profile.per_slice[m] = weighted_sd(column, w);
  }
  profile.mean = std::accumulate(profile.per_slice.begin(), profile.per_slice.end(), 0.0) /
                 static_cast<double>(m_total);
  return profile;
}

std::string kass_raftery_band(double log_bf) {
  const double two_ln = 2.0 * std::abs(log_bf);
  if (two_ln < 2.0) return "not worth more than a bare mention";
  if (two_ln < 6.0) return "positive";
  if (two_ln < 10.0) return "strong";
  return "very strong";
}

BayesFactor bayes_factor(const EvidenceEstimate& ev1, const EvidenceEstimate& ev2) {
  if (ev1.record_hash != ev2.record_hash)
    throw ConsistencyError("evidence estimates come from different records");
  BayesFactor bf;
  bf.log_z1 = ev1.log_z;
  bf.log_z2 = ev2.log_z;
  bf.log_bf = ev1.log_z - ev2.log_z;
  bf.mc_error = std::sqrt(ev1.mc_error_rough * ev1.mc_error_rough +
                          ev2.mc_error_rough * ev2.mc_error_rough);
  bf.interpretation = kass_raftery_band(bf.log_bf);
  return bf;
}

std::vector<Chronology> sample_chronologies(const std::vector<ChronologySample>& particles,
                                            std::size_t k, RngStream& rng) {
  if (k < 1) throw ConfigError("need at least one chronology draw");
  if (particles.empty()) throw ConfigError("no particles to draw from");
  std::vector<double> weights;
  weights.reserve(particles.size());
  for (const ChronologySample& p : particles) weights.push_back(p.weight);
  const std::vector<double> w = normalized_weights(weights);

  std::vector<Chronology> out(k);
  for (std::size_t d = 0; d < k; ++d) {
    const double u = rng.uniform();
    double cum = 0.0;
    std::size_t idx = particles.size() - 1;
    for (std::size_t i = 0; i < particles.size(); ++i) {
      cum += w[i];
      if (u <= cum) {
        idx = i;
        break;
      }
    }
    out[d].times = particles[idx].T;
    out[d].validate();
  }
  return out;
}

void write_posterior_csv(const std::string& path, const SmcResult& result) {
  std::ostringstream out;
  for (std::size_t i = 0; i < result.active.size(); ++i)
    out << param_names()[result.active[i]] << ",";
  out << "weight\n";
  for (const PosteriorDraw& draw : result.particles) {
    for (int idx : result.active) out << format_double(get_param(draw.params, idx)) << ",";
    out << format_double(draw.weight) << "\n";
  }
  atomic_write_file(path, out.str());
}

void write_chronology_csv(const std::string& path,
                          const std::vector<ChronologySample>& particles) {
  std::ostringstream out;
  out << "particle,slice,T_kyr,x1,x2,weight\n";
  for (std::size_t i = 0; i < particles.size(); ++i) {
    const ChronologySample& p = particles[i];
    for (std::size_t m = 0; m < p.T.size(); ++m)
      out << (i + 1) << "," << (m + 1) << "," << format_double(p.T[m]) << ","
          << format_double(p.x1[m]) << "," << format_double(p.x2[m]) << ","
          << format_double(p.weight) << "\n";
  }
  atomic_write_file(path, out.str());
}

std::vector<ChronologySample> read_chronology_csv(const std::string& path) {
  const std::string content = read_file(path);
  std::istringstream in(content);
  std::string line;
  std::size_t line_no = 0;
  std::vector<ChronologySample> out;
  long current_id = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (!saw_header) {
      if (fields != std::vector<std::string>{"particle", "slice", "T_kyr", "x1", "x2", "weight"})
        throw ParseError("expected header particle,slice,T_kyr,x1,x2,weight", line_no);
      saw_header = true;
      continue;
    }
    if (fields.size() != 6) throw ParseError("expected six columns", line_no);
    char* end = nullptr;
    const long id = std::strtol(fields[0].c_str(), &end, 10);
    if (end == fields[0].c_str() || *end != '\0' || id < 1)
      throw ParseError("bad particle id '" + fields[0] + "'", line_no);
    double vals[4];
    for (int f = 0; f < 4; ++f) {
      const std::string& tok = fields[f + 2];
      end = nullptr;
      vals[f] = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0' || !std::isfinite(vals[f]))
        throw ParseError("bad number '" + tok + "'", line_no);
    }
    if (id != current_id) {
      if (id != current_id + 1 || (current_id > 0 && out.back().T.empty()))
        throw ParseError("particle ids must be contiguous and ordered", line_no);
      current_id = id;
      out.emplace_back();
      out.back().weight = vals[3];
    }
    ChronologySample& p = out.back();
    if (!p.T.empty() && !(vals[0] > p.T.back()))
      throw ParseError("chronology not strictly increasing", line_no);
    p.T.push_back(vals[0]);
    p.x1.push_back(vals[1]);
    p.x2.push_back(vals[2]);
  }
  if (out.empty()) throw ParseError("chronology file holds no particles");
  const std::size_t m_total = out[0].T.size();
  for (const ChronologySample& p : out)
    if (p.T.size() != m_total) throw ParseError("particles disagree on slice count");
  return out;
}

void write_evidence_json(const std::string& path, const EvidenceEstimate& ev,
                         double wall_seconds) {
  nlohmann::json j;
  j["log_Z"] = ev.log_z;
  j["increments"] = ev.increments;
  j["settings"] = {{"n_theta", ev.n_theta},
                   {"n_x", ev.n_x},
                   {"seed", ev.seed},
                   {"model", ev.model},
                   {"mode", ev.mode}};
  j["rejuvenations"] = ev.rejuvenation_count;
  j["mc_error_rough"] = ev.mc_error_rough;
  j["record_hash"] = hex64(ev.record_hash);
  j["wall_time_s"] = wall_seconds;
  atomic_write_file(path, j.dump(2) + "\n");
}

EvidenceEstimate read_evidence_json(const std::string& path) {
  const std::string content = read_file(path);
  EvidenceEstimate ev;
  try {
    const nlohmann::json j = nlohmann::json::parse(content);
    ev.log_z = j.at("log_Z").get<double>();
    ev.increments = j.at("increments").get<std::vector<double>>();
    const nlohmann::json& s = j.at("settings");
    ev.n_theta = s.at("n_theta").get<int>();
    ev.n_x = s.at("n_x").get<int>();
    ev.seed = s.at("seed").get<std::uint64_t>();
    ev.model = s.at("model").get<std::string>();
    ev.mode = s.at("mode").get<std::string>();
    ev.rejuvenation_count = j.at("rejuvenations").get<int>();
    ev.mc_error_rough = j.at("mc_error_rough").get<double>();
    ev.record_hash = std::strtoull(j.at("record_hash").get<std::string>().c_str(), nullptr, 16);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad evidence file ") + path + ": " + e.what());
  }
  return ev;
}

void write_hdr_csv(const std::string& path, const std::vector<HdrInterval>& intervals) {
  std::ostringstream out;
  out << "slice,quantity,lo,hi,segment\n";
  for (const HdrInterval& interval : intervals)
    for (std::size_t s = 0; s < interval.segments.size(); ++s)
      out << interval.slice << "," << interval.quantity << ","
          << format_double(interval.segments[s].lo) << ","
          << format_double(interval.segments[s].hi) << "," << (s + 1) << "\n";
  atomic_write_file(path, out.str());
}

void write_age_sd_csv(const std::string& path, const AgeSdProfile& profile) {
  std::ostringstream out;
  out << "slice,age_sd_kyr\n";
  for (std::size_t m = 0; m < profile.per_slice.size(); ++m)
    out << (m + 1) << "," << format_double(profile.per_slice[m]) << "\n";
  atomic_write_file(path, out.str());
}

void write_bayes_factor_json(const std::string& path, const BayesFactor& bf) {
  nlohmann::json j;
  j["log_bf"] = bf.log_bf;
  j["two_ln_bf"] = 2.0 * bf.log_bf;
  j["log_Z_1"] = bf.log_z1;
  j["log_Z_2"] = bf.log_z2;
  j["mc_error"] = bf.mc_error;
  j["interpretation"] = bf.interpretation;
  atomic_write_file(path, j.dump(2) + "\n");
}

}  // namespace paleo
