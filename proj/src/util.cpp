#include "paleo/util.hpp"

#include <algorithm>

#include "paleo/errors.hpp"
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace paleo {

double log_sum_exp(std::span<const double> v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

double log_mean_exp(std::span<const double> v) {
  if (v.empty()) return kNegInf;
  return log_sum_exp(v) - std::log(static_cast<double>(v.size()));
}

bool normalize_log_weights(std::span<double> log_w) {
  double lse = log_sum_exp(log_w);
  if (lse == kNegInf) {
    for (double& w : log_w) w = 0.0;
    return false;
  }
  for (double& w : log_w) w = std::exp(w - lse);
  return true;
}

double effective_sample_size(std::span<const double> weights) {
  double s2 = 0.0;
  for (double w : weights) s2 += w * w;
  return s2 > 0.0 ? 1.0 / s2 : 0.0;
}

double weighted_mean(std::span<const double> x, std::span<const double> w) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m += w[i] * x[i];
  return m;
}

double weighted_sd(std::span<const double> x, std::span<const double> w) {
  double m = weighted_mean(x, w);
  double v = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) v += w[i] * (x[i] - m) * (x[i] - m);
  return std::sqrt(std::max(v, 0.0));
}

double weighted_quantile(std::span<const double> x, std::span<const double> w, double q) {
  if (x.empty()) throw std::invalid_argument("weighted_quantile: empty sample");
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  double acc = 0.0;
  for (std::size_t i : idx) {
    acc += w[i];
    if (acc >= q) return x[i];
  }
  return x[idx.back()];
}

double log_normal_cdf(double x) {
  if (x > -30.0) {
    return std::log(0.5 * std::erfc(-x * M_SQRT1_2));
  }
  // Asymptotic lower-tail expansion: Phi(x) ~ phi(x)/(-x) * (1 - 1/x^2 + 3/x^4 - ...)
  double x2 = x * x;
  double corr = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
  return -0.5 * x2 - 0.5 * std::log(2.0 * M_PI) - std::log(-x) + std::log(corr);
}

double normal_logpdf(double x, double mean, double sd) {
  double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * M_PI);
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf);
}

void atomic_write_file(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::remove(tmp.c_str());
      throw std::runtime_error("write failed: " + tmp);
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("rename failed: " + path);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) {
    std::size_t b = cur.find_first_not_of(" \t\r");
    std::size_t e = cur.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? "" : cur.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  int nw = std::max(1, workers);
  if (nw == 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  nw = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(nw), n));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nw));
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (int t = 0; t < nw; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace paleo
