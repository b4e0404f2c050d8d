#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "paleo/util.hpp"

namespace paleo::oracle {

double IgCdfGrid::operator()(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= x_max) return 1.0;
  const double pos = x / dx;
  const std::size_t i = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(i);
  return cdf[i] + frac * (cdf[i + 1] - cdf[i]);
}

IgCdfGrid ig_cdf_quadrature(double mean, double shape, double x_max, std::size_t n) {
  IgCdfGrid grid;
  grid.x_max = x_max;
  grid.dx = x_max / static_cast<double>(n);
  grid.cdf.resize(n + 1);
  double prev = 0.0;
  double acc = 0.0;
  grid.cdf[0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double x = grid.dx * static_cast<double>(i);
    const double f = std::exp(ig_logpdf(x, mean, shape));
    acc += 0.5 * (prev + f) * grid.dx;
    grid.cdf[i] = acc;
    prev = f;
  }
  for (double& c : grid.cdf) c /= acc;  // absorb the truncated tail
  return grid;
}

double kalman_loglik(std::span<const double> y, std::span<const double> times, double beta0,
                     double beta1, double sigma1, double d_offset, double c_scale,
                     double sigma_y, double mean_x1, double sd_x1, double max_step) {
  if (y.size() != times.size() || y.empty()) throw std::invalid_argument("kalman sizes");
  double mu = mean_x1;
  double var = sd_x1 * sd_x1;
  double ll = 0.0;
  for (std::size_t m = 0; m < y.size(); ++m) {
    if (m > 0) {
      const std::size_t n = substep_count(times[m - 1], times[m], max_step);
      const double h = (times[m] - times[m - 1]) / static_cast<double>(n);
      const double a = 1.0 - beta1 * h;
      double gain = 1.0, shift = 0.0, q = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        shift = a * shift - beta0 * h;
        q = a * a * q + sigma1 * sigma1 * h;
        gain *= a;
      }
      mu = gain * mu + shift;
      var = gain * gain * var + q;
    }
    const double s = c_scale * c_scale * var + sigma_y * sigma_y;
    const double resid = y[m] - (d_offset + c_scale * mu);
    ll += -0.5 * resid * resid / s - 0.5 * std::log(2.0 * M_PI * s);
    const double k_gain = var * c_scale / s;
    mu += k_gain * resid;
    var *= 1.0 - k_gain * c_scale;
  }
  return ll;
}

double min_window_width(std::span<const double> values, std::span<const double> weights,
                        double mass, int grid_points, double range_pad_bw) {
  const std::size_t n = values.size();
  std::vector<double> w(weights.begin(), weights.end());
  double total = 0.0;
  for (double v : w) total += v;
  for (double& v : w) v /= total;

  const double mean = weighted_mean(values, w);
  const double sd = weighted_sd(values, w);
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double lo_q = sorted[static_cast<std::size_t>(0.25 * (n - 1))];
  const double hi_q = sorted[static_cast<std::size_t>(0.75 * (n - 1))];
  const double iqr = hi_q - lo_q;
  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  double sum_sq = 0.0;
  for (double v : w) sum_sq += v * v;
  const double n_eff = 1.0 / sum_sq;
  const double bw = 0.9 * spread * std::pow(n_eff, -0.2);

  const double lo = sorted.front() - range_pad_bw * bw;
  const double hi = sorted.back() + range_pad_bw * bw;
  const double dx = (hi - lo) / static_cast<double>(grid_points - 1);
  std::vector<double> dens(grid_points, 0.0);
  for (int g = 0; g < grid_points; ++g) {
    const double x = lo + dx * static_cast<double>(g);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = (x - values[i]) / bw;
      acc += w[i] * std::exp(-0.5 * z * z);
    }
    dens[g] = acc;
  }
  double dens_total = 0.0;
  for (double d : dens) dens_total += d;

  double best = hi - lo;
  for (int i = 0; i < grid_points; ++i) {
    double acc = 0.0;
    for (int j = i; j < grid_points; ++j) {
      acc += dens[j];
      if (acc >= mass * dens_total) {
        best = std::min(best, dx * static_cast<double>(j - i));
        break;
      }
    }
  }
  return best;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

Moments sample_moments(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  Moments m;
  for (double v : x) m.mean += v;
  m.mean /= n;
  double m4 = 0.0;
  for (double v : x) {
    const double d = v - m.mean;
    m.var += d * d;
    m4 += d * d * d * d;
  }
  m.var /= n;
  m4 /= n;
  m.se_mean = std::sqrt(m.var / n);
  m.se_var = std::sqrt(std::max(m4 - m.var * m.var, 0.0) / n);
  return m;
}

}  // namespace paleo::oracle
