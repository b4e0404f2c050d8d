#ifndef PALEO_ORBITAL_HPP
#define PALEO_ORBITAL_HPP

#include <string>
#include <variant>
#include <vector>

#include "paleo/errors.hpp"

namespace paleo {

// Time is measured in kyr with the present at t = 0 and the past negative.
// The trigonometric expansions used here are adequate over the last ~1 Myr,
// which bounds the validity window.
inline constexpr double kOrbitalWindowStart = -1000.0;  // kyr
inline constexpr double kOrbitalWindowEnd = 0.0;

struct TrigTerm {
  double amplitude = 0.0;
  double angular_frequency = 0.0;  // rad/kyr, non-negative
  double phase = 0.0;              // rad
};

// Truncated trigonometric expansions of the orbital elements. Climatic
// precession e*sin(w) is the sine sum of the precession terms and coprecession
// e*cos(w) the cosine sum of the same terms; obliquity and eccentricity are
// cosine sums. A zero-frequency term encodes a constant offset such as the
// obliquity series mean.
struct OrbitalSeries {
  std::vector<TrigTerm> precession;
  std::vector<TrigTerm> obliquity;
  std::vector<TrigTerm> eccentricity;
  double reference_epoch = 0.0;  // kyr, present

  void validate() const;
};

// Tabulated components on a strictly increasing time grid, for workflows that
// supply their own forcing table; evaluated by linear interpolation.
struct TabulatedOrbital {
  std::vector<double> t;  // kyr, strictly increasing
  std::vector<double> precession;
  std::vector<double> coprecession;
  std::vector<double> obliquity;

  void validate() const;
};

struct RawOrbital {
  double e_sin_w = 0.0;
  double e_cos_w = 0.0;
  double obliquity = 0.0;
};

struct NormalizationConstants {
  double mean_p = 0.0, sd_p = 1.0;
  double mean_c = 0.0, sd_c = 1.0;
  double mean_e = 0.0, sd_e = 1.0;
  double window_start = kOrbitalWindowStart;
  double window_end = kOrbitalWindowEnd;
  double sample_step = 1.0;

  void validate() const;
};

struct ForcingWeights {
  double gamma_p = 0.0;
  double gamma_c = 0.0;
  double gamma_e = 0.0;

  bool all_zero() const { return gamma_p == 0.0 && gamma_c == 0.0 && gamma_e == 0.0; }
};

RawOrbital raw_orbital(double t_kyr, const OrbitalSeries& series);
double eccentricity(double t_kyr, const OrbitalSeries& series);

// Either source of the raw components behind one evaluation surface.
class OrbitalSource {
 public:
  explicit OrbitalSource(OrbitalSeries series);
  explicit OrbitalSource(TabulatedOrbital table);

  RawOrbital raw(double t_kyr) const;
  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }

 private:
  std::variant<OrbitalSeries, TabulatedOrbital> impl_;
  double t_min_ = kOrbitalWindowStart;
  double t_max_ = kOrbitalWindowEnd;
};

// Sample moments over the half-open grid {start + k*step, k = 0..n-1} with
// population standard deviations, so each normalized component has mean 0 and
// sd 1 on exactly that grid.
NormalizationConstants normalize_series(const OrbitalSource& source, double window_start,
                                        double window_end, double step);

// The scalar forcing: weighted sum of the normalized components at t.
double forcing(double t_kyr, const ForcingWeights& weights, const OrbitalSource& source,
               const NormalizationConstants& constants);

inline NormalizationConstants normalize_series(const OrbitalSeries& series, double window_start,
                                               double window_end, double step) {
  return normalize_series(OrbitalSource(series), window_start, window_end, step);
}

inline double forcing(double t_kyr, const ForcingWeights& weights, const OrbitalSeries& series,
                      const NormalizationConstants& constants) {
  return forcing(t_kyr, weights, OrbitalSource(series), constants);
}

// Normalized components precomputed on a uniform grid and combined with the
// weights through linear interpolation. Immutable after construction; the
// integrator reads it concurrently.
class ForcingGrid {
 public:
  ForcingGrid(const OrbitalSource& source, const NormalizationConstants& constants,
              double t_start, double t_end, double step);

  double value(double t_kyr, const ForcingWeights& weights) const;
  bool contains(double t_kyr) const { return t_kyr >= t0_ && t_kyr <= t1_; }
  double t_start() const { return t0_; }
  double t_end() const { return t1_; }

 private:
  double t0_, t1_, step_;
  std::vector<double> p_, c_, e_;
};

// Coefficient file: one `component amplitude frequency phase` term per line,
// `#` comments; component is precession|obliquity|eccentricity, frequency in
// rad/kyr, phase in rad.
OrbitalSeries load_orbital_series(const std::string& path);

// CSV with header t_kyr,prec,coprec,obliquity and strictly increasing t.
TabulatedOrbital load_tabulated_orbital(const std::string& path);

}  // namespace paleo

#endif
