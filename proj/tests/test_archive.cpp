#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "paleo/archive.hpp"
#include "paleo/rng.hpp"
#include "paleo/util.hpp"

using namespace paleo;

namespace {

ArchiveParams desk_archive() {
  ArchiveParams p;
  p.mu_s = 0.04;
  p.sigma_s = 0.05;
  p.c = 0.002;
  p.phi0 = 0.5;
  return p;
}

double invert_cdf(const oracle::IgCdfGrid& cdf, double q) {
  double lo = 0.0, hi = cdf.x_max;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < q ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("compact_correct hand values and monotonicity") {
  ArchiveParams p = desk_archive();
  p.c = 0.0;
  CHECK(compact_correct(3.7, p) == 3.7);
  p.c = 0.001;
  CHECK(compact_correct(0.0, p) == 0.0);
  CHECK(compact_correct(10.0, p) == doctest::Approx(10.2).epsilon(1e-12));

  p = desk_archive();
  double prev = -1.0;
  for (double h = 0.0; h <= 40.0; h += 0.37) {
    const double hc = compact_correct(h, p);
    CHECK(hc >= h);
    CHECK(hc > prev);
    prev = hc;
  }

  ArchiveParams bad = desk_archive();
  bad.phi0 = 1.0;
  CHECK_THROWS_AS(compact_correct(1.0, bad), ConfigError);
  CHECK_THROWS_AS(compact_correct(-0.1, desk_archive()), DomainError);
}

TEST_CASE("make_depth_grid validates ordering and corrects depths") {
  const ArchiveParams p = desk_archive();
  const DepthGrid grid = make_depth_grid({12.0, 8.0, 3.0, 0.5}, p);
  REQUIRE(grid.depths.size() == 4);
  REQUIRE(grid.corrected_depths.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(grid.corrected_depths[i] >= grid.depths[i]);
    CHECK(grid.corrected_depths[i] ==
          doctest::Approx(compact_correct(grid.depths[i], p)).epsilon(1e-15));
    if (i > 0) CHECK(grid.corrected_depths[i] < grid.corrected_depths[i - 1]);
  }

  for (const std::vector<double>& bad :
       {std::vector<double>{}, {5.0, 5.0}, {5.0, 7.0}, {5.0, 0.0}})
    CHECK_THROWS_AS(make_depth_grid(bad, p), OrderingError);
}

TEST_CASE("chronology validation") {
  Chronology good{{-300.0, -120.5, -7.0}};
  CHECK_NOTHROW(good.validate());
  const Chronology empty{};
  const Chronology tied{{-5.0, -5.0}};
  const Chronology present{{-5.0, 0.0}};
  const Chronology reversed{{-5.0, -6.0}};
  CHECK_THROWS_AS(empty.validate(), OrderingError);
  CHECK_THROWS_AS(tied.validate(), OrderingError);
  CHECK_THROWS_AS(present.validate(), OrderingError);
  CHECK_THROWS_AS(reversed.validate(), OrderingError);
}

TEST_CASE("ig_logpdf formula, support, mode, and normalization") {
  CHECK(ig_logpdf(0.0, 2.0, 8.0) == kNegInf);
  CHECK(ig_logpdf(-1.0, 2.0, 8.0) == kNegInf);
  CHECK_THROWS_AS(ig_logpdf(1.0, 0.0, 8.0), DomainError);
  CHECK_THROWS_AS(ig_logpdf(1.0, 2.0, -1.0), DomainError);

  const double x = 1.3, mu = 2.0, lam = 8.0;
  const double direct = 0.5 * std::log(lam / (2.0 * M_PI * x * x * x)) -
                        lam * (x - mu) * (x - mu) / (2.0 * mu * mu * x);
  CHECK(ig_logpdf(x, mu, lam) == doctest::Approx(direct).epsilon(1e-14));

  const double ratio = 3.0 * 1.5 / (2.0 * 2.0);
  const double mode = 1.5 * (std::sqrt(1.0 + ratio * ratio) - ratio);
  double best_x = 0.0, best = kNegInf;
  for (double g = 1e-3; g < 5.0; g += 1e-3) {
    const double v = ig_logpdf(g, 1.5, 2.0);
    if (v > best) {
      best = v;
      best_x = g;
    }
  }
  CHECK(std::abs(best_x - mode) < 2e-3);

  const double total =
      oracle::simpson_exp([&](double u) { return ig_logpdf(u, 2.0, 8.0); }, 1e-9, 60.0, 60000);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
  const double total2 =
      oracle::simpson_exp([&](double u) { return ig_logpdf(u, 0.5, 0.3); }, 1e-9, 80.0, 80000);
  CHECK(total2 == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("ig_logcdf agrees with quadrature of the density") {
  const double mu = 2.0, lam = 8.0;
  const oracle::IgCdfGrid grid = oracle::ig_cdf_quadrature(mu, lam, 80.0, 160000);
  for (double x : {0.2, 0.7, 1.5, 2.0, 3.5, 6.0, 12.0}) {
    const double have = std::exp(ig_logcdf(x, mu, lam));
    CHECK(have == doctest::Approx(grid(x)).epsilon(1e-5));
  }
  CHECK(ig_logcdf(-1.0, mu, lam) == kNegInf);
  CHECK(ig_logcdf(0.0, mu, lam) == kNegInf);
  double prev = kNegInf;
  for (double x = 0.1; x < 20.0; x += 0.1) {
    const double v = ig_logcdf(x, mu, lam);
    CHECK(v >= prev);
    CHECK(v <= 0.0);
    prev = v;
  }
}

TEST_CASE("sample_ig moments and distribution") {
  const double mu = 2.0, lam = 8.0;
  RngStream rng(rng_key(31, {7}));
  const int n = 100000;
  std::vector<double> draws(n);
  for (double& d : draws) d = sample_ig(mu, lam, rng);
  const auto m = oracle::sample_moments(draws);
  CHECK(std::abs(m.mean - mu) < 4.0 * m.se_mean);
  CHECK(std::abs(m.var - mu * mu * mu / lam) < 4.0 * m.se_var);

  const oracle::IgCdfGrid cdf = oracle::ig_cdf_quadrature(mu, lam, 80.0, 160000);
  std::vector<double> sub(draws.begin(), draws.begin() + 30000);
  const double ks = oracle::ks_distance(sub, cdf);
  CHECK(ks < 1.9495 / std::sqrt(30000.0));
}

TEST_CASE("age_marginal_logpdf is the transformed inverse Gaussian") {
  const ArchiveParams p = desk_archive();
  const double hc = 1.3;
  const double mean = hc / p.mu_s, shape = hc * hc / (p.sigma_s * p.sigma_s);
  for (double T : {-80.0, -32.5, -10.0, -1.0})
    CHECK(age_marginal_logpdf(T, hc, p) == ig_logpdf(-T, mean, shape));
  CHECK(age_marginal_logpdf(0.0, hc, p) == kNegInf);
  CHECK(age_marginal_logpdf(2.0, hc, p) == kNegInf);
  CHECK_THROWS_AS(age_marginal_logpdf(-1.0, 0.0, p), DomainError);

  // with a large shape the density peaks close to -a when Hc = mu_s * a
  const double a = 25.0;
  double best_T = 0.0, best = kNegInf;
  for (double T = -40.0; T < -10.0; T += 1e-3) {
    const double v = age_marginal_logpdf(T, p.mu_s * a, p);
    if (v > best) {
      best = v;
      best_T = T;
    }
  }
  const double mu_a = a, lam_a = std::pow(p.mu_s * a, 2) / (p.sigma_s * p.sigma_s);
  const double r = 3.0 * mu_a / (2.0 * lam_a);
  const double mode_a = mu_a * (std::sqrt(1.0 + r * r) - r);
  CHECK(std::abs(-best_T - mode_a) < 2e-3);
  // the mode offset from -a is 3 sigma_s^2 / (2 mu_s^2) + O(1/a), small relative to a
  CHECK(std::abs(-best_T - a) / a < 0.1);
}

TEST_CASE("age_transition_logpdf support and exact normalization") {
  const ArchiveParams p = desk_archive();
  const double h_prev = 1.2, h_m = 0.9;
  CHECK(age_transition_logpdf(-50.0, -40.0, h_m, h_prev, p) == kNegInf);
  CHECK(age_transition_logpdf(-40.0, -40.0, h_m, h_prev, p) == kNegInf);
  CHECK(age_transition_logpdf(0.0, -40.0, h_m, h_prev, p) == kNegInf);
  CHECK_THROWS_AS(age_transition_logpdf(-5.0, -40.0, h_prev, h_m, p), OrderingError);
  CHECK_THROWS_AS(age_transition_logpdf(-5.0, -40.0, 0.0, h_prev, p), OrderingError);

  auto normalization = [&](double T_prev) {
    return oracle::simpson_exp(
        [&](double T) { return age_transition_logpdf(T, T_prev, h_m, h_prev, p); },
        T_prev + 1e-9, -1e-12, 200000);
  };
  CHECK(normalization(-40.0) == doctest::Approx(1.0).epsilon(1e-6));
  // heavy truncation pressure: the increment mean alone exceeds |T_prev|
  CHECK(normalization(-6.0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("propose_age concentrates in the small-noise limit") {
  ArchiveParams p = desk_archive();
  p.mu_s = 2.0;
  p.sigma_s = 0.02;
  RngStream rng(rng_key(4, {1}));
  const double T_prev = -30.0;
  for (int i = 0; i < 1000; ++i) {
    const AgeProposal prop = propose_age(T_prev, 0.5, 1.5, p, rng);
    REQUIRE(!prop.degenerate);
    CHECK(std::abs(prop.T - (T_prev + 0.5)) < 0.05);
  }
}

TEST_CASE("propose_age matches untruncated IG moments and density far from the present") {
  const ArchiveParams p = desk_archive();
  const double h_prev = 1.2, h_m = 0.9, T_prev = -500.0;
  const double dh = h_prev - h_m;
  const double mean = dh / p.mu_s, shape = dh * dh / (p.sigma_s * p.sigma_s);
  RngStream rng(rng_key(4, {2}));
  const int n = 50000;
  std::vector<double> taus(n);
  for (int i = 0; i < n; ++i) {
    const AgeProposal prop = propose_age(T_prev, h_m, h_prev, p, rng);
    REQUIRE(!prop.degenerate);
    CHECK(prop.T > T_prev);
    CHECK(prop.T < 0.0);
    taus[i] = prop.T - T_prev;
    if (i < 100) {
      const double expect =
          ig_logpdf(taus[i], mean, shape) - ig_logcdf(-T_prev, mean, shape);
      CHECK(prop.log_q == doctest::Approx(expect).epsilon(1e-12));
      const double lw =
          age_transition_logpdf(prop.T, T_prev, h_m, h_prev, p) - prop.log_q;
      CHECK(std::isfinite(lw));
    }
  }
  const auto m = oracle::sample_moments(taus);
  CHECK(std::abs(m.mean - mean) < 4.0 * m.se_mean);
  CHECK(std::abs(m.var - mean * mean * mean / shape) < 4.0 * m.se_var);
}

TEST_CASE("propose_age flags degenerate particles at the retry cap") {
  ArchiveParams p = desk_archive();
  p.sigma_s = 0.005;
  RngStream rng(rng_key(4, {3}));
  const double T_prev = -1e-6;
  const AgeProposal prop = propose_age(T_prev, 0.9, 1.2, p, rng, 50);
  CHECK(prop.degenerate);
  CHECK(prop.T > T_prev);
  CHECK(prop.T < 0.0);
}

TEST_CASE("marginal age density matches the sampler") {
  const ArchiveParams p = desk_archive();
  const double hc = 0.8;
  const double mean = hc / p.mu_s, shape = hc * hc / (p.sigma_s * p.sigma_s);
  RngStream rng(rng_key(4, {4}));
  const int n = 30000;
  std::vector<double> ages(n);
  for (double& a : ages) a = sample_ig(mean, shape, rng);
  const oracle::IgCdfGrid cdf = oracle::ig_cdf_quadrature(mean, shape, 120.0, 120000);
  CHECK(oracle::ks_distance(ages, cdf) < 1.9495 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("two-slice chain matches first-passage path simulation") {
  // Forward construction: accumulated corrected depth S(a) = mu_s a + sigma_s W(a)
  // over age a; the slice at corrected depth Hc was deposited at the first
  // passage of S through Hc. Simulated crossings use a Brownian-bridge firing
  // probability per step so the discretization bias is O(du), far below the
  // Monte Carlo error at this sample size.
  ArchiveParams p;
  p.mu_s = 0.5;
  p.sigma_s = 0.4;
  p.c = 0.0;
  p.phi0 = 0.0;
  const double h2 = 0.6;  // shallower slice, crossed first
  const double h1 = 1.0;  // deeper slice
  const double du = 0.004;
  const double u_cap = 50.0;
  const int n_paths = 60000;
  const double sig2du = p.sigma_s * p.sigma_s * du;

  RngStream rng(rng_key(777, {1}));
  std::vector<double> a2(n_paths), incr(n_paths);
  for (int i = 0; i < n_paths; ++i) {
    double s = 0.0, u = 0.0;
    double target = h2;
    double crossed_at = -1.0;
    while (u < u_cap) {
      const double s_next = s + p.mu_s * du + p.sigma_s * std::sqrt(du) * rng.normal();
      u += du;
      bool fired = s_next >= target;
      if (!fired) {
        const double gap_a = target - s, gap_b = target - s_next;
        fired = rng.uniform() < std::exp(-2.0 * gap_a * gap_b / sig2du);
      }
      if (fired) {
        if (crossed_at < 0.0) {
          crossed_at = u;
          target = h1;
          if (s_next >= target) {
            incr[i] = 0.0;
            break;
          }
        } else {
          incr[i] = u - crossed_at;
          break;
        }
      }
      s = s_next;
    }
    REQUIRE(u < u_cap);
    a2[i] = crossed_at;
  }

  const double mu2 = h2 / p.mu_s, lam2 = h2 * h2 / (p.sigma_s * p.sigma_s);
  const double dmu = (h1 - h2) / p.mu_s, dlam = (h1 - h2) * (h1 - h2) / (p.sigma_s * p.sigma_s);
  const oracle::IgCdfGrid cdf2 = oracle::ig_cdf_quadrature(mu2, lam2, 40.0, 80000);
  const oracle::IgCdfGrid cdfi = oracle::ig_cdf_quadrature(dmu, dlam, 40.0, 80000);
  const double ks_crit = 1.9495 / std::sqrt(static_cast<double>(n_paths));
  CHECK(oracle::ks_distance(a2, cdf2) < ks_crit);
  CHECK(oracle::ks_distance(incr, cdfi) < ks_crit);

  // independence of the increment from the first crossing (strong Markov)
  double ma = 0.0, mi = 0.0;
  for (int i = 0; i < n_paths; ++i) {
    ma += a2[i];
    mi += incr[i];
  }
  ma /= n_paths;
  mi /= n_paths;
  double cov = 0.0, va = 0.0, vi = 0.0;
  for (int i = 0; i < n_paths; ++i) {
    cov += (a2[i] - ma) * (incr[i] - mi);
    va += (a2[i] - ma) * (a2[i] - ma);
    vi += (incr[i] - mi) * (incr[i] - mi);
  }
  const double corr = cov / std::sqrt(va * vi);
  CHECK(std::abs(corr) < 4.0 / std::sqrt(static_cast<double>(n_paths)));

  // joint cell occupancy against the product law implied by the chain
  // p(T1) p(T2|T1) = ig(a2; h2) ig(a1-a2; dh)
  std::vector<double> q2(3), qi(3);
  for (int k = 0; k < 3; ++k) {
    q2[k] = invert_cdf(cdf2, 0.25 * (k + 1));
    qi[k] = invert_cdf(cdfi, 0.25 * (k + 1));
  }
  std::vector<int> counts(16, 0);
  for (int i = 0; i < n_paths; ++i) {
    const int r = static_cast<int>(std::lower_bound(q2.begin(), q2.end(), a2[i]) - q2.begin());
    const int c = static_cast<int>(std::lower_bound(qi.begin(), qi.end(), incr[i]) - qi.begin());
    ++counts[4 * r + c];
  }
  const double p_cell = 1.0 / 16.0;
  const double se = std::sqrt(p_cell * (1.0 - p_cell) / n_paths);
  for (int cell = 0; cell < 16; ++cell) {
    const double freq = static_cast<double>(counts[cell]) / n_paths;
    CHECK(std::abs(freq - p_cell) < 4.0 * se);
  }
}
