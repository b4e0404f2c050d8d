#ifndef PALEO_UTIL_HPP
#define PALEO_UTIL_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace paleo {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(sum(exp(v))) with the usual max shift; all -inf input gives -inf.
double log_sum_exp(std::span<const double> v);

// log(mean(exp(v))).
double log_mean_exp(std::span<const double> v);

// Normalizes log weights in place to plain weights summing to 1.
// Returns false (and zero weights) when every entry is -inf.
bool normalize_log_weights(std::span<double> log_w);

// Effective sample size 1/sum(w^2) of normalized weights.
double effective_sample_size(std::span<const double> weights);

double weighted_mean(std::span<const double> x, std::span<const double> w);
// Population convention: sum w*(x-mean)^2 with weights summing to 1.
double weighted_sd(std::span<const double> x, std::span<const double> w);
// Weighted quantile of the empirical distribution (samples sorted internally).
double weighted_quantile(std::span<const double> x, std::span<const double> w, double q);

// log of the standard normal CDF, accurate deep into the lower tail.
double log_normal_cdf(double x);
double normal_logpdf(double x, double mean, double sd);

// FNV-1a, for reproducible content fingerprints in manifests.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

// Writes via a temporary file in the same directory plus rename, so readers
// never observe a partial file; the temporary is removed on failure.
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

// Splits one CSV line on commas; no quoting support, fields are trimmed.
std::vector<std::string> split_csv_line(const std::string& line);

std::string format_double(double v);

// Runs fn(i) for i in [0, n) on up to `workers` threads. Work items must write
// to disjoint state; ordering of execution is unspecified.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace paleo

#endif
