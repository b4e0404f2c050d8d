#include "paleo/orbital.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "paleo/util.hpp"

namespace paleo {

namespace {

void check_terms(const std::vector<TrigTerm>& terms, const char* name) {
  if (terms.empty()) throw ConfigError(std::string("orbital series has no ") + name + " terms");
  for (const TrigTerm& term : terms) {
    if (!std::isfinite(term.amplitude) || !std::isfinite(term.angular_frequency) ||
        !std::isfinite(term.phase))
      throw ConfigError(std::string("non-finite ") + name + " term");
    if (term.angular_frequency < 0.0)
      throw ConfigError(std::string("negative frequency in ") + name + " terms");
  }
}

double cosine_sum(const std::vector<TrigTerm>& terms, double t) {
  double acc = 0.0;
  for (const TrigTerm& term : terms)
    acc += term.amplitude * std::cos(term.angular_frequency * t + term.phase);
  return acc;
}

double sine_sum(const std::vector<TrigTerm>& terms, double t) {
  double acc = 0.0;
  for (const TrigTerm& term : terms)
    acc += term.amplitude * std::sin(term.angular_frequency * t + term.phase);
  return acc;
}

double interp(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  // callers have already range-checked x
  std::size_t hi = 1;
  while (hi + 1 < xs.size() && xs[hi] < x) ++hi;
  const double w = (x - xs[hi - 1]) / (xs[hi] - xs[hi - 1]);
  return ys[hi - 1] + w * (ys[hi] - ys[hi - 1]);
}

void check_window(double t_kyr) {
  if (!(t_kyr >= kOrbitalWindowStart && t_kyr <= kOrbitalWindowEnd))
    throw DomainError("orbital series evaluated at t=" + format_double(t_kyr) +
                      " kyr, outside the validity window [" +
                      format_double(kOrbitalWindowStart) + ", " + format_double(kOrbitalWindowEnd) +
                      "]");
}

double parse_number(const std::string& tok, std::size_t line_no, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0' || !std::isfinite(v))
    throw ParseError(std::string("bad ") + what + " '" + tok + "'", line_no);
  return v;
}

}  // namespace

void OrbitalSeries::validate() const {
  check_terms(precession, "precession");
  check_terms(obliquity, "obliquity");
  check_terms(eccentricity, "eccentricity");
}

void TabulatedOrbital::validate() const {
  if (t.size() < 2) throw ConfigError("tabulated orbital components need at least two rows");
  if (precession.size() != t.size() || coprecession.size() != t.size() ||
      obliquity.size() != t.size())
    throw ConfigError("tabulated orbital component columns have unequal lengths");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw ConfigError("tabulated orbital times are not strictly increasing");
}

void NormalizationConstants::validate() const {
  if (!(sd_p > 0.0) || !(sd_c > 0.0) || !(sd_e > 0.0))
    throw ConfigError("orbital normalization has a non-positive standard deviation");
  if (!(window_start < window_end))
    throw ConfigError("orbital normalization window is empty");
  if (window_end > 0.0) throw ConfigError("orbital normalization window extends past the present");
}

RawOrbital raw_orbital(double t_kyr, const OrbitalSeries& series) {
  check_window(t_kyr);
  RawOrbital raw;
  raw.e_sin_w = sine_sum(series.precession, t_kyr - series.reference_epoch);
  raw.e_cos_w = cosine_sum(series.precession, t_kyr - series.reference_epoch);
  raw.obliquity = cosine_sum(series.obliquity, t_kyr - series.reference_epoch);
  return raw;
}

double eccentricity(double t_kyr, const OrbitalSeries& series) {
  check_window(t_kyr);
  return cosine_sum(series.eccentricity, t_kyr - series.reference_epoch);
}

OrbitalSource::OrbitalSource(OrbitalSeries series) : impl_(std::move(series)) {
  std::get<OrbitalSeries>(impl_).validate();
}

OrbitalSource::OrbitalSource(TabulatedOrbital table) : impl_(std::move(table)) {
  const TabulatedOrbital& tab = std::get<TabulatedOrbital>(impl_);
  tab.validate();
  t_min_ = tab.t.front();
  t_max_ = tab.t.back();
}

RawOrbital OrbitalSource::raw(double t_kyr) const {
  if (t_kyr < t_min_ || t_kyr > t_max_)
    throw DomainError("orbital components requested at t=" + format_double(t_kyr) +
                      " kyr, outside [" + format_double(t_min_) + ", " + format_double(t_max_) +
                      "]");
  if (const OrbitalSeries* series = std::get_if<OrbitalSeries>(&impl_))
    return raw_orbital(t_kyr, *series);
  const TabulatedOrbital& tab = std::get<TabulatedOrbital>(impl_);
  RawOrbital raw;
  raw.e_sin_w = interp(tab.t, tab.precession, t_kyr);
  raw.e_cos_w = interp(tab.t, tab.coprecession, t_kyr);
  raw.obliquity = interp(tab.t, tab.obliquity, t_kyr);
  return raw;
}

NormalizationConstants normalize_series(const OrbitalSource& source, double window_start,
                                        double window_end, double step) {
  if (!(step > 0.0)) throw ConfigError("normalization step must be positive");
  if (!(window_start < window_end)) throw ConfigError("normalization window is empty");
  const std::size_t n =
      static_cast<std::size_t>(std::floor((window_end - window_start) / step + 1e-9));
  if (n < 2) throw ConfigError("normalization window shorter than two sample steps");

  std::vector<double> p(n), c(n), e(n);
  for (std::size_t k = 0; k < n; ++k) {
    const RawOrbital raw = source.raw(window_start + static_cast<double>(k) * step);
    p[k] = raw.e_sin_w;
    c[k] = raw.e_cos_w;
    e[k] = raw.obliquity;
  }
  const std::vector<double> ones(n, 1.0 / static_cast<double>(n));

  NormalizationConstants constants;
  constants.mean_p = weighted_mean(p, ones);
  constants.sd_p = weighted_sd(p, ones);
  constants.mean_c = weighted_mean(c, ones);
  constants.sd_c = weighted_sd(c, ones);
  constants.mean_e = weighted_mean(e, ones);
  constants.sd_e = weighted_sd(e, ones);
  const auto degenerate = [](double sd, double mean) {
    return !(sd > 1e-12 * (1.0 + std::abs(mean)));
  };
  if (degenerate(constants.sd_p, constants.mean_p))
    throw ConfigError("precession component is constant over the normalization window");
  if (degenerate(constants.sd_c, constants.mean_c))
    throw ConfigError("coprecession component is constant over the normalization window");
  if (degenerate(constants.sd_e, constants.mean_e))
    throw ConfigError("obliquity component is constant over the normalization window");
  constants.window_start = window_start;
  constants.window_end = window_end;
  constants.sample_step = step;
  constants.validate();
  return constants;
}

double forcing(double t_kyr, const ForcingWeights& weights, const OrbitalSource& source,
               const NormalizationConstants& constants) {
  const RawOrbital raw = source.raw(t_kyr);
  return weights.gamma_p * (raw.e_sin_w - constants.mean_p) / constants.sd_p +
         weights.gamma_c * (raw.e_cos_w - constants.mean_c) / constants.sd_c +
         weights.gamma_e * (raw.obliquity - constants.mean_e) / constants.sd_e;
}

ForcingGrid::ForcingGrid(const OrbitalSource& source, const NormalizationConstants& constants,
                         double t_start, double t_end, double step)
    : t0_(t_start), t1_(t_end), step_(step) {
  constants.validate();
  if (!(step > 0.0)) throw ConfigError("forcing grid step must be positive");
  if (!(t_start < t_end)) throw ConfigError("forcing grid span is empty");
  const std::size_t n = static_cast<std::size_t>(std::ceil((t_end - t_start) / step - 1e-9)) + 1;
  p_.resize(n);
  c_.resize(n);
  e_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = std::min(t_start + static_cast<double>(k) * step, t_end);
    const RawOrbital raw = source.raw(t);
    p_[k] = (raw.e_sin_w - constants.mean_p) / constants.sd_p;
    c_[k] = (raw.e_cos_w - constants.mean_c) / constants.sd_c;
    e_[k] = (raw.obliquity - constants.mean_e) / constants.sd_e;
  }
}

double ForcingGrid::value(double t_kyr, const ForcingWeights& weights) const {
  if (!contains(t_kyr))
    throw DomainError("forcing requested at t=" + format_double(t_kyr) + " kyr, outside [" +
                      format_double(t0_) + ", " + format_double(t1_) + "]");
  const double u = (t_kyr - t0_) / step_;
  std::size_t i = static_cast<std::size_t>(u);
  if (i + 1 >= p_.size()) i = p_.size() - 2;
  const double w = u - static_cast<double>(i);
  const double p = p_[i] + w * (p_[i + 1] - p_[i]);
  const double c = c_[i] + w * (c_[i + 1] - c_[i]);
  const double e = e_[i] + w * (e_[i + 1] - e_[i]);
  return weights.gamma_p * p + weights.gamma_c * c + weights.gamma_e * e;
}

OrbitalSeries load_orbital_series(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open orbital coefficient file " + path);
  OrbitalSeries series;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string component;
    if (!(ss >> component)) continue;  // blank or comment-only
    std::string amp_tok, freq_tok, phase_tok;
    if (!(ss >> amp_tok >> freq_tok >> phase_tok))
      throw ParseError("expected `component amplitude frequency phase`", line_no);
    std::string extra;
    if (ss >> extra) throw ParseError("trailing field '" + extra + "'", line_no);
    TrigTerm term;
    term.amplitude = parse_number(amp_tok, line_no, "amplitude");
    term.angular_frequency = parse_number(freq_tok, line_no, "frequency");
    term.phase = parse_number(phase_tok, line_no, "phase");
    if (component == "precession")
      series.precession.push_back(term);
    else if (component == "obliquity")
      series.obliquity.push_back(term);
    else if (component == "eccentricity")
      series.eccentricity.push_back(term);
    else
      throw ParseError("unknown component '" + component + "'", line_no);
  }
  series.validate();
  return series;
}

TabulatedOrbital load_tabulated_orbital(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open tabulated forcing file " + path);
  TabulatedOrbital table;
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (!saw_header) {
      if (fields != std::vector<std::string>{"t_kyr", "prec", "coprec", "obliquity"})
        throw ParseError("expected header t_kyr,prec,coprec,obliquity", line_no);
      saw_header = true;
      continue;
    }
    if (fields.size() != 4) throw ParseError("expected four columns", line_no);
    table.t.push_back(parse_number(fields[0], line_no, "t_kyr"));
    table.precession.push_back(parse_number(fields[1], line_no, "prec"));
    table.coprecession.push_back(parse_number(fields[2], line_no, "coprec"));
    table.obliquity.push_back(parse_number(fields[3], line_no, "obliquity"));
  }
  if (!saw_header) throw ParseError("missing header t_kyr,prec,coprec,obliquity", line_no);
  table.validate();
  return table;
}

}  // namespace paleo
