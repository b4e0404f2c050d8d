#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "paleo/rng.hpp"
#include "paleo/util.hpp"

using namespace paleo;

TEST_CASE("log_sum_exp and log_mean_exp") {
  const std::vector<double> v{std::log(1.0), std::log(2.0)};
  CHECK(log_sum_exp(v) == doctest::Approx(std::log(3.0)).epsilon(1e-14));
  CHECK(log_mean_exp(v) == doctest::Approx(std::log(1.5)).epsilon(1e-14));

  const std::vector<double> inf_only{kNegInf, kNegInf};
  CHECK(log_sum_exp(inf_only) == kNegInf);

  const std::vector<double> shifted{1000.0 + std::log(1.0), 1000.0 + std::log(2.0)};
  CHECK(log_sum_exp(shifted) == doctest::Approx(1000.0 + std::log(3.0)).epsilon(1e-14));

  const std::vector<double> mixed{0.0, kNegInf};
  CHECK(log_sum_exp(mixed) == doctest::Approx(0.0));
}

TEST_CASE("normalize_log_weights") {
  std::vector<double> lw{std::log(2.0), std::log(6.0), kNegInf};
  CHECK(normalize_log_weights(lw));
  CHECK(lw[0] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(lw[1] == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(lw[2] == 0.0);

  std::vector<double> dead{kNegInf, kNegInf};
  CHECK_FALSE(normalize_log_weights(dead));
  CHECK(dead[0] == 0.0);
  CHECK(dead[1] == 0.0);
}

TEST_CASE("effective sample size") {
  const std::vector<double> eq{0.25, 0.25, 0.25, 0.25};
  CHECK(effective_sample_size(eq) == doctest::Approx(4.0).epsilon(1e-14));
  const std::vector<double> one{1.0, 0.0, 0.0};
  CHECK(effective_sample_size(one) == doctest::Approx(1.0).epsilon(1e-14));
  const std::vector<double> half{0.5, 0.5, 0.0, 0.0};
  CHECK(effective_sample_size(half) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("weighted mean and sd against direct accumulation") {
  RngStream rng(31);
  const int n = 257;
  std::vector<double> x(n), w(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    x[i] = rng.normal(3.0, 2.0);
    w[i] = rng.uniform();
    total += w[i];
  }
  for (double& v : w) v /= total;
  double mean = 0.0;
  for (int i = 0; i < n; ++i) mean += w[i] * x[i];
  double var = 0.0;
  for (int i = 0; i < n; ++i) var += w[i] * (x[i] - mean) * (x[i] - mean);
  CHECK(weighted_mean(x, w) == doctest::Approx(mean).epsilon(1e-12));
  CHECK(weighted_sd(x, w) == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
}

TEST_CASE("weighted quantile") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  const std::vector<double> w{0.25, 0.25, 0.25, 0.25};
  CHECK(weighted_quantile(x, w, 0.0) == doctest::Approx(1.0));
  CHECK(weighted_quantile(x, w, 1.0) == doctest::Approx(4.0));
  const double med = weighted_quantile(x, w, 0.5);
  CHECK(med >= 2.0);
  CHECK(med <= 3.0);

  const std::vector<double> skew{0.97, 0.01, 0.01, 0.01};
  CHECK(weighted_quantile(x, skew, 0.5) == doctest::Approx(1.0));
}

TEST_CASE("normal log pdf and cdf") {
  CHECK(normal_logpdf(0.0, 0.0, 1.0) ==
        doctest::Approx(-0.5 * std::log(2.0 * M_PI)).epsilon(1e-14));
  CHECK(normal_logpdf(1.0, 3.0, 2.0) ==
        doctest::Approx(-0.5 - std::log(2.0) - 0.5 * std::log(2.0 * M_PI)).epsilon(1e-14));

  for (double x : {-3.0, -1.0, 0.0, 0.5, 2.5}) {
    const double ref = std::log(0.5 * std::erfc(-x / std::sqrt(2.0)));
    CHECK(log_normal_cdf(x) == doctest::Approx(ref).epsilon(1e-10));
  }
  const double deep = log_normal_cdf(-40.0);
  const double asym = -0.5 * 1600.0 - std::log(40.0) - 0.5 * std::log(2.0 * M_PI);
  CHECK(deep == doctest::Approx(asym).epsilon(1e-3));
}

TEST_CASE("fnv1a64 known vectors and hex formatting") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex64(0xcbf29ce484222325ULL) == "cbf29ce484222325");
  CHECK(hex64(0x1ULL) == "0000000000000001");
}

TEST_CASE("atomic_write_file round trip") {
  const std::string path = "util_test_atomic.txt";
  atomic_write_file(path, "hello\nworld\n");
  CHECK(read_file(path) == "hello\nworld\n");
  atomic_write_file(path, "second");
  CHECK(read_file(path) == "second");
  std::filesystem::remove(path);
  CHECK_THROWS(read_file(path));
}

TEST_CASE("split_csv_line") {
  const auto fields = split_csv_line(" a ,b, 1.5 ");
  REQUIRE(fields.size() == 3);
  CHECK(fields[0] == "a");
  CHECK(fields[1] == "b");
  CHECK(fields[2] == "1.5");
  CHECK(split_csv_line("x").size() == 1);
  CHECK(split_csv_line("x,").size() == 2);
}

TEST_CASE("format_double round trips") {
  for (double v : {0.1, 1.0 / 3.0, -782.00125, 1e-17, 0.0, 321.0}) {
    const double back = std::stod(format_double(v));
    CHECK(back == v);
  }
}

TEST_CASE("parallel_for runs every index once and propagates exceptions") {
  const std::size_t n = 1000;
  std::vector<int> hits(n, 0);
  parallel_for(n, 4, [&](std::size_t i) { hits[i]++; });
  bool all_once = true;
  for (int h : hits) all_once = all_once && h == 1;
  CHECK(all_once);

  parallel_for(0, 4, [&](std::size_t) { throw std::runtime_error("unreached"); });

  CHECK_THROWS_AS(parallel_for(8, 3,
                               [&](std::size_t i) {
                                 if (i == 5) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}
