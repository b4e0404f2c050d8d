#include "paleo/observation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "paleo/util.hpp"

namespace paleo {

void CalibrationParams::validate() const {
  if (!std::isfinite(d_offset) || !std::isfinite(c_scale) || !std::isfinite(sigma_y))
    throw ConfigError("non-finite calibration parameter");
  if (!(sigma_y > 0.0)) throw ConfigError("measurement sd sigma_y must be positive");
}

void CoreRecord::validate() const {
  if (slices.empty()) throw ParseError("core has no slices");
  for (std::size_t i = 0; i < slices.size(); ++i) {
    if (!std::isfinite(slices[i].depth_m) || !std::isfinite(slices[i].d18o))
      throw ParseError("non-finite slice data");
    if (!(slices[i].depth_m > 0.0)) throw ParseError("slice depths must be positive");
    if (i > 0 && !(slices[i].depth_m < slices[i - 1].depth_m))
      throw ParseError("slice depths must be strictly decreasing");
  }
  for (const TiePoint& tie : tie_points) {
    if (tie.slice >= slices.size()) throw ParseError("tie point references a missing slice");
    if (!(tie.age_sd > 0.0)) throw ParseError("tie point sd must be positive");
    if (!std::isfinite(tie.age_mean)) throw ParseError("non-finite tie point age");
  }
}

bool CoreRecord::has_tie_at(std::size_t slice) const { return tie_at(slice) != nullptr; }

const TiePoint* CoreRecord::tie_at(std::size_t slice) const {
  for (const TiePoint& tie : tie_points)
    if (tie.slice == slice) return &tie;
  return nullptr;
}

double obs_loglik(double y, double x1, const CalibrationParams& calib) {
  return normal_logpdf(y, calib.d_offset + calib.c_scale * x1, calib.sigma_y);
}

double tiepoint_loglik(double T, double age_mean, double age_sd) {
  if (!(age_sd > 0.0)) throw DomainError("tie point sd must be positive");
  return normal_logpdf(-T, age_mean, age_sd);
}

namespace {

double parse_number(const std::string& tok, std::size_t line_no, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0' || !std::isfinite(v))
    throw ParseError(std::string("bad ") + what + " '" + tok + "'", line_no);
  return v;
}

struct RawTie {
  double depth_m = 0.0;
  double age_mean = 0.0;
  double age_sd = 0.0;
};

std::string stem_of(const std::string& path) {
  std::size_t start = path.find_last_of("/\\");
  start = (start == std::string::npos) ? 0 : start + 1;
  std::size_t dot = path.find_last_of('.');
  if (dot == std::string::npos || dot < start) dot = path.size();
  return path.substr(start, dot - start);
}

}  // namespace

CoreRecord load_core(const std::string& path, std::vector<std::string>* notices) {
  const std::string content = read_file(path);
  CoreRecord record;
  record.name = stem_of(path);
  record.content_hash = fnv1a64(content);

  std::vector<RawTie> raw_ties;
  std::vector<std::size_t> row_lines;
  std::istringstream in(content);
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string key;
      meta >> key;
      if (key == "tiepoint") {
        std::string d_tok, a_tok, s_tok;
        if (!(meta >> d_tok >> a_tok >> s_tok))
          throw ParseError("expected `#tiepoint depth_m age_kyr sd_kyr`", line_no);
        RawTie tie;
        tie.depth_m = parse_number(d_tok, line_no, "tie point depth");
        tie.age_mean = parse_number(a_tok, line_no, "tie point age");
        tie.age_sd = parse_number(s_tok, line_no, "tie point sd");
        if (!(tie.age_sd > 0.0)) throw ParseError("tie point sd must be positive", line_no);
        raw_ties.push_back(tie);
      } else if (key == "core") {
        std::string name;
        if (meta >> name) record.name = name;
      }
      continue;
    }
    const std::vector<std::string> fields = split_csv_line(line);
    if (!saw_header) {
      if (fields != std::vector<std::string>{"depth_m", "d18O"})
        throw ParseError("expected header depth_m,d18O", line_no);
      saw_header = true;
      continue;
    }
    if (fields.size() != 2) throw ParseError("expected two columns", line_no);
    CoreSlice slice;
    slice.depth_m = parse_number(fields[0], line_no, "depth");
    slice.d18o = parse_number(fields[1], line_no, "d18O");
    record.slices.push_back(slice);
    row_lines.push_back(line_no);
  }
  if (!saw_header) throw ParseError("missing header depth_m,d18O", line_no);
  if (record.slices.empty()) throw ParseError("core has no data rows", line_no);

  const bool shallow_first =
      record.slices.size() > 1 && record.slices.front().depth_m < record.slices.back().depth_m;
  if (shallow_first) {
    std::reverse(record.slices.begin(), record.slices.end());
    std::reverse(row_lines.begin(), row_lines.end());
    if (notices) notices->push_back("reordered " + record.name + " slices deepest-first");
  }
  for (std::size_t i = 1; i < record.slices.size(); ++i)
    if (record.slices[i].depth_m == record.slices[i - 1].depth_m)
      throw ParseError("duplicate depth " + format_double(record.slices[i].depth_m),
                       static_cast<int>(std::max(row_lines[i], row_lines[i - 1])));

  if (!raw_ties.empty()) {
    double deepest_tie = raw_ties.front().depth_m;
    for (const RawTie& tie : raw_ties) deepest_tie = std::max(deepest_tie, tie.depth_m);
    const std::size_t before = record.slices.size();
    while (!record.slices.empty() && record.slices.front().depth_m > deepest_tie + 1e-9)
      record.slices.erase(record.slices.begin());
    if (record.slices.size() != before && notices)
      notices->push_back("dropped " + std::to_string(before - record.slices.size()) +
                         " slices below the deepest tie point of " + record.name);
    for (const RawTie& tie : raw_ties) {
      std::size_t index = record.slices.size();
      for (std::size_t i = 0; i < record.slices.size(); ++i)
        if (std::abs(record.slices[i].depth_m - tie.depth_m) <= 1e-9) {
          index = i;
          break;
        }
      if (index == record.slices.size())
        throw ParseError("tie point depth " + format_double(tie.depth_m) +
                         " does not match any slice");
      record.tie_points.push_back({index, tie.age_mean, tie.age_sd});
    }
  }

  record.validate();
  return record;
}

std::string serialize_core(const CoreRecord& record) {
  record.validate();
  std::ostringstream out;
  out << "#core " << record.name << "\n";
  for (const TiePoint& tie : record.tie_points)
    out << "#tiepoint " << format_double(record.slices[tie.slice].depth_m) << " "
        << format_double(tie.age_mean) << " " << format_double(tie.age_sd) << "\n";
  out << "depth_m,d18O\n";
  for (const CoreSlice& slice : record.slices)
    out << format_double(slice.depth_m) << "," << format_double(slice.d18o) << "\n";
  return out.str();
}

void write_core(const CoreRecord& record, const std::string& path) {
  atomic_write_file(path, serialize_core(record));
}

}  // namespace paleo
