#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "paleo/prior.hpp"
#include "paleo/rng.hpp"
#include "paleo/util.hpp"

using namespace paleo;

namespace {

DistSpec make_spec(DistKind kind, double mean, double sd, double lo = 0.0, double hi = 1.0) {
  DistSpec s;
  s.kind = kind;
  s.mean = mean;
  s.sd = sd;
  s.lo = lo;
  s.hi = hi;
  return s;
}

}  // namespace

TEST_CASE("canonical parameter table") {
  const auto& names = param_names();
  REQUIRE(names.size() == kNumParams);
  CHECK(names[0] == "beta0");
  CHECK(names[6] == "sigma2");
  CHECK(names[7] == "gamma_p");
  CHECK(names[9] == "gamma_e");
  CHECK(names[10] == "d18o_offset");
  CHECK(names[16] == "porosity");
  for (int i = 0; i < kNumParams; ++i) CHECK(param_index(names[i]) == i);
  CHECK(param_index("no_such_param") == -1);

  ModelParams p = default_base_params();
  for (int i = 0; i < kNumParams; ++i) {
    const double v = 0.01 * (i + 1);
    set_param(p, i, v);
    CHECK(get_param(p, i) == v);
  }
  CHECK(p.dynamics.beta0 == 0.01);
  CHECK(p.weights.gamma_e == 0.10);
  CHECK(p.archive.phi0 == 0.17);
}

TEST_CASE("active parameter sets by variant and chronology mode") {
  const std::vector<int> fj = active_params(ModelVariant::forced, false);
  const std::vector<int> uj = active_params(ModelVariant::unforced, false);
  const std::vector<int> ff = active_params(ModelVariant::forced, true);
  const std::vector<int> uf = active_params(ModelVariant::unforced, true);
  CHECK(fj.size() == 17);
  CHECK(uj.size() == 14);
  CHECK(ff.size() == 13);
  CHECK(uf.size() == 10);
  for (int i = 0; i < kNumParams; ++i) CHECK(fj[i] == i);
  for (int g : {7, 8, 9}) {
    CHECK(std::find(uj.begin(), uj.end(), g) == uj.end());
    CHECK(std::find(uf.begin(), uf.end(), g) == uf.end());
  }
  for (int a : {13, 14, 15, 16}) {
    CHECK(std::find(ff.begin(), ff.end(), a) == ff.end());
    CHECK(std::find(uf.begin(), uf.end(), a) == uf.end());
  }

  CHECK(parse_variant("forced") == ModelVariant::forced);
  CHECK(parse_variant("unforced") == ModelVariant::unforced);
  CHECK_THROWS_AS(parse_variant("both"), ConfigError);
  CHECK(variant_name(ModelVariant::unforced) == "unforced");
}

TEST_CASE("dist spec validation") {
  CHECK_THROWS_AS(make_spec(DistKind::uniform, 0, 1, 2.0, 2.0).validate(), ConfigError);
  CHECK_THROWS_AS(make_spec(DistKind::gaussian, 0, 0.0).validate(), ConfigError);
  CHECK_THROWS_AS(make_spec(DistKind::log_gaussian, 0, -1.0).validate(), ConfigError);
  CHECK_THROWS_AS(make_spec(DistKind::truncated_gaussian, 0, 1, 3.0, 1.0).validate(),
                  ConfigError);
  CHECK_THROWS_AS(make_spec(DistKind::truncated_gaussian, 0, 1e-9, 5.0, 6.0).validate(),
                  ConfigError);
  CHECK_NOTHROW(make_spec(DistKind::truncated_gaussian, 0.5, 0.25, 0.0, 0.95).validate());

  CHECK(parse_dist_kind("log-gaussian") == DistKind::log_gaussian);
  CHECK(dist_kind_name(DistKind::truncated_gaussian) == "truncated-gaussian");
  CHECK_THROWS_AS(parse_dist_kind("cauchy"), ConfigError);
}

TEST_CASE("dist spec densities normalize and match sampled moments") {
  const DistSpec uni = make_spec(DistKind::uniform, 0, 1, -2.0, 3.0);
  const DistSpec gau = make_spec(DistKind::gaussian, 1.5, 0.7);
  const DistSpec lgn = make_spec(DistKind::log_gaussian, -1.0, 0.5);
  const DistSpec tru = make_spec(DistKind::truncated_gaussian, 0.5, 0.25, 0.0, 0.95);

  CHECK(oracle::simpson_exp([&](double x) { return uni.logpdf(x); }, -2.0 + 1e-12, 3.0 - 1e-12,
                            2000) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(oracle::simpson_exp([&](double x) { return gau.logpdf(x); }, 1.5 - 8.0 * 0.7,
                            1.5 + 8.0 * 0.7, 20000) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(oracle::simpson_exp([&](double x) { return lgn.logpdf(x); }, 1e-9, 20.0, 40000) ==
        doctest::Approx(1.0).epsilon(1e-8));
  CHECK(oracle::simpson_exp([&](double x) { return tru.logpdf(x); }, 1e-12, 0.95 - 1e-12,
                            4000) == doctest::Approx(1.0).epsilon(1e-8));

  const int n = 100000;
  RngStream rng(rng_key(20, {1}));
  std::vector<double> draws(n);

  for (double& d : draws) d = uni.sample(rng);
  auto m = oracle::sample_moments(draws);
  for (double d : draws) {
    if (!(d > -2.0 && d < 3.0)) {
      FAIL("uniform draw out of bounds");
      break;
    }
  }
  CHECK(std::abs(m.mean - 0.5) < 4.0 * m.se_mean);
  CHECK(std::abs(m.var - 25.0 / 12.0) < 4.0 * m.se_var);

  for (double& d : draws) d = gau.sample(rng);
  m = oracle::sample_moments(draws);
  CHECK(std::abs(m.mean - 1.5) < 4.0 * m.se_mean);
  CHECK(std::abs(m.var - 0.49) < 4.0 * m.se_var);

  for (double& d : draws) d = lgn.sample(rng);
  m = oracle::sample_moments(draws);
  const double lg_mean = std::exp(-1.0 + 0.5 * 0.25);
  const double lg_var = (std::exp(0.25) - 1.0) * std::exp(-2.0 + 0.25);
  CHECK(std::abs(m.mean - lg_mean) < 4.0 * m.se_mean);
  CHECK(std::abs(m.var - lg_var) < 4.0 * m.se_var);

  for (double& d : draws) d = tru.sample(rng);
  m = oracle::sample_moments(draws);
  const double a = (0.0 - 0.5) / 0.25, b = (0.95 - 0.5) / 0.25;
  const double phi_a = std::exp(-0.5 * a * a) / std::sqrt(2.0 * M_PI);
  const double phi_b = std::exp(-0.5 * b * b) / std::sqrt(2.0 * M_PI);
  const double mass = oracle::normal_cdf(b) - oracle::normal_cdf(a);
  const double tr_mean = 0.5 + 0.25 * (phi_a - phi_b) / mass;
  CHECK(std::abs(m.mean - tr_mean) < 4.0 * m.se_mean);
  for (double d : draws) {
    if (!(d > 0.0 && d < 0.95)) {
      FAIL("truncated draw out of bounds");
      break;
    }
  }
}

TEST_CASE("unconstrained transforms round trip with exact jacobians") {
  const std::vector<DistSpec> specs = {
      make_spec(DistKind::uniform, 0, 1, -2.0, 3.0), make_spec(DistKind::gaussian, 1.5, 0.7),
      make_spec(DistKind::log_gaussian, -1.0, 0.5),
      make_spec(DistKind::truncated_gaussian, 0.5, 0.25, 0.0, 0.95)};
  RngStream rng(rng_key(20, {2}));
  for (const DistSpec& s : specs) {
    for (int i = 0; i < 200; ++i) {
      const double x = s.sample(rng);
      const double u = s.to_unconstrained(x);
      CHECK(s.from_unconstrained(u) == doctest::Approx(x).epsilon(1e-12));

      const double h = 1e-5;
      const double slope =
          (s.from_unconstrained(u + h) - s.from_unconstrained(u - h)) / (2.0 * h);
      CHECK(s.log_jacobian(u) == doctest::Approx(std::log(slope)).epsilon(1e-6));
    }
    // the pushforward density integrates to 1 on the unconstrained line
    const double total = oracle::simpson_exp(
        [&](double u) { return s.logpdf(s.from_unconstrained(u)) + s.log_jacobian(u); }, -30.0,
        30.0, 60000);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-7));
  }
}

TEST_CASE("prior sampling touches only active components") {
  const Prior prior;
  const ModelParams base = default_base_params();
  const std::vector<int> active = {0, 11};
  RngStream rng(rng_key(20, {3}));
  for (int rep = 0; rep < 50; ++rep) {
    const ModelParams draw = prior.sample(active, base, rng);
    for (int i = 0; i < kNumParams; ++i) {
      if (i == 0 || i == 11) continue;
      CHECK(get_param(draw, i) == get_param(base, i));
    }
  }
}

TEST_CASE("prior logpdf sums the active marginals") {
  const Prior prior;
  ModelParams p = default_base_params();
  const std::vector<int> active = {0, 3, 16};
  set_param(p, 0, 0.21);
  set_param(p, 3, 0.17);
  set_param(p, 16, 0.62);
  double expect = 0.0;
  for (int i : active) expect += prior.spec(i).logpdf(get_param(p, i));
  CHECK(prior.logpdf(p, active) == doctest::Approx(expect).epsilon(1e-14));

  set_param(p, 3, -0.1);  // outside log-gaussian support
  CHECK(prior.logpdf(p, active) == kNegInf);
}

TEST_CASE("prior vector transforms round trip through parameter structs") {
  const Prior prior;
  const ModelParams base = default_base_params();
  const std::vector<int> active = active_params(ModelVariant::forced, false);
  RngStream rng(rng_key(20, {4}));
  const ModelParams draw = prior.sample(active, base, rng);
  const std::vector<double> u = prior.to_unconstrained(draw, active);
  REQUIRE(u.size() == active.size());
  const ModelParams back = prior.from_unconstrained(u, active, base);
  for (int i = 0; i < kNumParams; ++i)
    CHECK(get_param(back, i) == doctest::Approx(get_param(draw, i)).epsilon(1e-12));

  double expect = prior.logpdf(draw, active);
  for (std::size_t k = 0; k < active.size(); ++k)
    expect += prior.spec(active[k]).log_jacobian(u[k]);
  CHECK(prior.log_density_unconstrained(u, active) == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("built-in defaults encode the documented weakly-informative choices") {
  const Prior prior;
  CHECK(prior.spec(0).kind == DistKind::gaussian);
  CHECK(prior.spec(0).mean == 0.0);
  CHECK(prior.spec(0).sd == 0.5);
  CHECK(prior.spec(3).kind == DistKind::log_gaussian);
  CHECK(prior.spec(3).mean == doctest::Approx(std::log(0.2)).epsilon(1e-15));
  CHECK(prior.spec(10).kind == DistKind::gaussian);
  CHECK(prior.spec(10).mean == 4.0);
  CHECK(prior.spec(16).kind == DistKind::truncated_gaussian);
  CHECK(prior.spec(16).lo == 0.0);
  CHECK(prior.spec(16).hi == 0.95);

  const ModelParams base = default_base_params();
  CHECK_NOTHROW(base.validate());
  CHECK(base.weights.gamma_p == 0.0);
  CHECK(base.weights.gamma_c == 0.0);
  CHECK(base.weights.gamma_e == 0.0);
}
