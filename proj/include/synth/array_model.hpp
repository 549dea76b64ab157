#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "synth/errors.hpp"

namespace synth {

/// Samples below this level are clamped so exact pattern nulls do not map to
/// -inf dB. Far below any side lobe level of interest.
inline constexpr double kDbFloorDb = -120.0;

/// How the polar angle theta enters the steering phase.
enum class AngleConvention {
  /// Directional factor cos(theta): a uniform in-phase array peaks at
  /// theta = 90 deg. Default.
  BroadsideAt90,
  /// Directional factor sin(theta): the beam peak of a uniform in-phase
  /// array falls at theta = 0 deg.
  BroadsideAt0,
};

namespace detail {

inline constexpr double kDegToRad = std::numbers::pi / 180.0;

/// sin of an angle in degrees, exact (0, +/-1) at multiples of 90.
inline double sin_deg(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  if (r == 0.0 || r == 180.0) return 0.0;
  if (r == 90.0) return 1.0;
  if (r == 270.0) return -1.0;
  return std::sin(deg * kDegToRad);
}

/// cos of an angle in degrees, exact at multiples of 90.
inline double cos_deg(double deg) {
  double r = std::fmod(std::fabs(deg), 360.0);
  if (r == 0.0) return 1.0;
  if (r == 180.0) return -1.0;
  if (r == 90.0 || r == 270.0) return 0.0;
  return std::cos(deg * kDegToRad);
}

/// The theta-dependent factor of the steering phase. For BroadsideAt90 this
/// is cos(theta), computed as -sin(theta - 90) so that grid points placed
/// symmetrically about 90 deg produce exactly negated values.
inline double directional_factor(double theta_deg, AngleConvention convention) {
  if (convention == AngleConvention::BroadsideAt90) {
    return -sin_deg(theta_deg - 90.0);
  }
  return sin_deg(theta_deg);
}

}  // namespace detail

/// Rectangular lattice of M x N elements in the x-y plane with fixed
/// spacings expressed in wavelengths.
struct ArrayGeometry {
  int m_count = 1;                ///< elements along x
  int n_count = 1;                ///< elements along y
  double dx_wavelengths = 0.5;    ///< element spacing along x / lambda
  double dy_wavelengths = 0.5;    ///< element spacing along y / lambda

  void validate() const {
    if (m_count < 1 || n_count < 1) {
      throw contract_violation("ArrayGeometry: element counts must be >= 1");
    }
    if (!(dx_wavelengths > 0.0) || !(dy_wavelengths > 0.0)) {
      throw contract_violation("ArrayGeometry: spacings must be > 0");
    }
  }
};

/// Non-negative amplitude weight per element, stored row-major (m major).
class ExcitationMatrix {
 public:
  ExcitationMatrix(std::size_t rows, std::size_t cols, std::vector<double> amplitudes)
      : rows_(rows), cols_(cols), amplitudes_(std::move(amplitudes)) {
    if (rows_ == 0 || cols_ == 0 || amplitudes_.size() != rows_ * cols_) {
      throw contract_violation("ExcitationMatrix: amplitude count does not match " +
                               std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    for (double a : amplitudes_) {
      if (!std::isfinite(a) || a < 0.0) {
        throw contract_violation("ExcitationMatrix: amplitudes must be finite and >= 0");
      }
    }
  }

  static ExcitationMatrix uniform(const ArrayGeometry& geometry, double amplitude = 1.0) {
    geometry.validate();
    return ExcitationMatrix(static_cast<std::size_t>(geometry.m_count),
                            static_cast<std::size_t>(geometry.n_count),
                            std::vector<double>(static_cast<std::size_t>(geometry.m_count) *
                                                    static_cast<std::size_t>(geometry.n_count),
                                                amplitude));
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double at(std::size_t m, std::size_t n) const { return amplitudes_[m * cols_ + n]; }
  std::span<const double> data() const { return amplitudes_; }

  double max_amplitude() const {
    return *std::max_element(amplitudes_.begin(), amplitudes_.end());
  }

  bool matches(const ArrayGeometry& geometry) const {
    return rows_ == static_cast<std::size_t>(geometry.m_count) &&
           cols_ == static_cast<std::size_t>(geometry.n_count);
  }

  friend bool operator==(const ExcitationMatrix&, const ExcitationMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> amplitudes_;
};

/// Far-field direction. phi is normalized into [0, 360).
struct Direction {
  double theta_deg = 90.0;
  double phi_deg = 0.0;

  static Direction of(double theta_deg, double phi_deg) {
    if (!(theta_deg >= 0.0 && theta_deg <= 180.0)) {
      throw contract_violation("Direction: theta must lie in [0, 180] deg");
    }
    double phi = std::fmod(phi_deg, 360.0);
    if (phi < 0.0) phi += 360.0;
    if (phi == 360.0) phi = 0.0;
    return Direction{theta_deg, phi};
  }
};

/// One phi-cut of the normalized power pattern, in dB (max sample = 0).
struct PatternCut {
  double phi_deg = 0.0;
  std::vector<double> theta_deg;
  std::vector<double> magnitude_db;

  void validate() const {
    if (theta_deg.size() < 3 || theta_deg.size() != magnitude_db.size()) {
      throw contract_violation("PatternCut: need >= 3 samples with matching grids");
    }
    for (std::size_t i = 1; i < theta_deg.size(); ++i) {
      if (!(theta_deg[i] > theta_deg[i - 1])) {
        throw contract_violation("PatternCut: theta grid must be strictly increasing");
      }
    }
    const double peak = *std::max_element(magnitude_db.begin(), magnitude_db.end());
    if (std::fabs(peak) > 1e-9) {
      throw contract_violation("PatternCut: maximum sample must be 0 dB");
    }
  }
};

/// Closed theta interval bracketing the lobe that contains the global peak.
struct LobeInterval {
  double theta_low_deg = 0.0;
  double theta_high_deg = 0.0;
};

/// Uniform theta sampling of [min_deg, max_deg]. When the range is symmetric
/// about 90 deg the points are constructed as exact mirror pairs
/// (theta_low = 180 - theta_high bitwise), which lets symmetric excitations
/// produce bitwise-symmetric cuts.
struct ThetaGrid {
  int count = 1801;
  double min_deg = 0.0;
  double max_deg = 180.0;

  std::vector<double> points() const {
    if (count < 3) throw contract_violation("ThetaGrid: need at least 3 points");
    if (!(min_deg < max_deg) || min_deg < 0.0 || max_deg > 180.0) {
      throw contract_violation("ThetaGrid: range must satisfy 0 <= min < max <= 180");
    }
    const std::size_t n = static_cast<std::size_t>(count);
    const double step = (max_deg - min_deg) / (count - 1);
    const double mid = 0.5 * (min_deg + max_deg);
    const double sum = min_deg + max_deg;
    std::vector<double> theta(n);
    for (std::size_t i = n / 2; i < n; ++i) {
      const double offset = (static_cast<double>(i) - 0.5 * (count - 1)) * step;
      const double hi = (i == n - 1) ? max_deg : mid + offset;
      theta[i] = hi;
      theta[n - 1 - i] = sum - hi;
    }
    for (std::size_t i = 1; i < n; ++i) {
      if (!(theta[i] > theta[i - 1])) {
        throw contract_violation("ThetaGrid: step too small for distinct points");
      }
    }
    return theta;
  }
};

namespace detail {

inline void check_pattern_inputs(const ArrayGeometry& geometry, const ExcitationMatrix& excitation) {
  geometry.validate();
  if (!excitation.matches(geometry)) {
    throw contract_violation("excitation is " + std::to_string(excitation.rows()) + "x" +
                             std::to_string(excitation.cols()) + " but geometry is " +
                             std::to_string(geometry.m_count) + "x" +
                             std::to_string(geometry.n_count));
  }
  if (!(excitation.max_amplitude() > 0.0)) {
    throw degenerate_excitation("all excitation amplitudes are zero");
  }
}

/// Sum_m x^m * (sum_n I[m,n] y^n) by nested Horner evaluation, with the
/// separable x==1 / y==1 cases collapsed onto precomputed row/column sums.
inline std::complex<double> array_factor_at(const ExcitationMatrix& exc, double phase_x,
                                            double phase_y, std::span<const double> row_sums,
                                            std::span<const double> col_sums) {
  const std::size_t rows = exc.rows(), cols = exc.cols();
  if (phase_x == 0.0) {
    const std::complex<double> y{std::cos(phase_y), std::sin(phase_y)};
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t n = cols; n-- > 0;) acc = acc * y + col_sums[n];
    return acc;
  }
  if (phase_y == 0.0) {
    const std::complex<double> x{std::cos(phase_x), std::sin(phase_x)};
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t m = rows; m-- > 0;) acc = acc * x + row_sums[m];
    return acc;
  }
  const std::complex<double> x{std::cos(phase_x), std::sin(phase_x)};
  const std::complex<double> y{std::cos(phase_y), std::sin(phase_y)};
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t m = rows; m-- > 0;) {
    std::complex<double> row{0.0, 0.0};
    for (std::size_t n = cols; n-- > 0;) row = row * y + exc.at(m, n);
    acc = acc * x + row;
  }
  return acc;
}

inline std::vector<double> row_sums_of(const ExcitationMatrix& exc) {
  std::vector<double> sums(exc.rows(), 0.0);
  for (std::size_t m = 0; m < exc.rows(); ++m)
    for (std::size_t n = 0; n < exc.cols(); ++n) sums[m] += exc.at(m, n);
  return sums;
}

inline std::vector<double> col_sums_of(const ExcitationMatrix& exc) {
  std::vector<double> sums(exc.cols(), 0.0);
  for (std::size_t m = 0; m < exc.rows(); ++m)
    for (std::size_t n = 0; n < exc.cols(); ++n) sums[n] += exc.at(m, n);
  return sums;
}

}  // namespace detail

/// Complex array factor sum_m sum_n I[m,n] exp(j(m kx dx + n ky dy)) for a
/// single direction, with all element phases fixed at zero.
inline std::complex<double> evaluate_array_factor(
    const ArrayGeometry& geometry, const ExcitationMatrix& excitation, const Direction& direction,
    AngleConvention convention = AngleConvention::BroadsideAt90) {
  detail::check_pattern_inputs(geometry, excitation);
  if (!(direction.theta_deg >= 0.0 && direction.theta_deg <= 180.0)) {
    throw contract_violation("Direction: theta must lie in [0, 180] deg");
  }
  const double t = detail::directional_factor(direction.theta_deg, convention);
  const double two_pi = 2.0 * std::numbers::pi;
  const double phase_x = two_pi * geometry.dx_wavelengths * detail::cos_deg(direction.phi_deg) * t;
  const double phase_y = two_pi * geometry.dy_wavelengths * detail::sin_deg(direction.phi_deg) * t;
  const auto row_sums = detail::row_sums_of(excitation);
  const auto col_sums = detail::col_sums_of(excitation);
  return detail::array_factor_at(excitation, phase_x, phase_y, row_sums, col_sums);
}

/// Samples |AF| along a phi-cut, converts to dB and normalizes the peak
/// sample to exactly 0 dB. Samples below kDbFloorDb are clamped to it.
inline PatternCut evaluate_cut(const ArrayGeometry& geometry, const ExcitationMatrix& excitation,
                               double phi_deg, std::span<const double> theta_grid_deg,
                               AngleConvention convention = AngleConvention::BroadsideAt90) {
  detail::check_pattern_inputs(geometry, excitation);
  if (theta_grid_deg.size() < 3) {
    throw contract_violation("evaluate_cut: theta grid needs >= 3 points");
  }
  for (std::size_t i = 0; i < theta_grid_deg.size(); ++i) {
    const double th = theta_grid_deg[i];
    if (!(th >= 0.0 && th <= 180.0)) {
      throw contract_violation("evaluate_cut: theta grid must lie within [0, 180] deg");
    }
    if (i > 0 && !(th > theta_grid_deg[i - 1])) {
      throw contract_violation("evaluate_cut: theta grid must be strictly increasing");
    }
  }

  const double two_pi = 2.0 * std::numbers::pi;
  const double cx = two_pi * geometry.dx_wavelengths * detail::cos_deg(phi_deg);
  const double cy = two_pi * geometry.dy_wavelengths * detail::sin_deg(phi_deg);
  const auto row_sums = detail::row_sums_of(excitation);
  const auto col_sums = detail::col_sums_of(excitation);

  std::vector<double> power(theta_grid_deg.size());
  for (std::size_t i = 0; i < theta_grid_deg.size(); ++i) {
    const double t = detail::directional_factor(theta_grid_deg[i], convention);
    power[i] = std::norm(detail::array_factor_at(excitation, cx * t, cy * t, row_sums, col_sums));
  }
  const double peak = *std::max_element(power.begin(), power.end());
  if (!(peak > 0.0)) {
    throw degenerate_excitation("pattern is zero at every grid sample");
  }

  PatternCut cut;
  cut.phi_deg = phi_deg;
  cut.theta_deg.assign(theta_grid_deg.begin(), theta_grid_deg.end());
  cut.magnitude_db.resize(power.size());
  for (std::size_t i = 0; i < power.size(); ++i) {
    const double db = 10.0 * std::log10(power[i] / peak);
    cut.magnitude_db[i] = std::max(db, kDbFloorDb);
  }
  return cut;
}

/// Brackets the lobe containing the global peak sample by walking outward
/// until the pattern first turns upward; a side with no such turn extends to
/// the grid boundary. Peak ties are broken toward the grid center.
inline LobeInterval locate_main_lobe(const PatternCut& cut) {
  const std::size_t n = cut.theta_deg.size();
  if (n < 3 || cut.magnitude_db.size() != n) {
    throw contract_violation("locate_main_lobe: cut needs >= 3 samples");
  }
  const auto& db = cut.magnitude_db;

  const double center = 0.5 * static_cast<double>(n - 1);
  std::size_t peak = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (db[i] > db[peak] ||
        (db[i] == db[peak] &&
         std::fabs(static_cast<double>(i) - center) < std::fabs(static_cast<double>(peak) - center))) {
      peak = i;
    }
  }

  std::size_t lo = peak;
  while (lo > 0 && db[lo - 1] <= db[lo]) --lo;
  std::size_t hi = peak;
  while (hi + 1 < n && db[hi + 1] <= db[hi]) ++hi;

  return LobeInterval{cut.theta_deg[lo], cut.theta_deg[hi]};
}

/// Highest sample strictly outside the lobe interval. Since cuts are
/// peak-normalized this is the side lobe level in dB relative to the beam.
inline double compute_sll(const PatternCut& cut, const LobeInterval& lobe) {
  const std::size_t n = cut.theta_deg.size();
  if (n < 3 || cut.magnitude_db.size() != n) {
    throw contract_violation("compute_sll: cut needs >= 3 samples");
  }
  if (!(lobe.theta_low_deg < lobe.theta_high_deg) || lobe.theta_low_deg < cut.theta_deg.front() ||
      lobe.theta_high_deg > cut.theta_deg.back()) {
    throw contract_violation("compute_sll: lobe interval must lie within the grid span");
  }
  double level = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (cut.theta_deg[i] < lobe.theta_low_deg || cut.theta_deg[i] > lobe.theta_high_deg) {
      level = std::max(level, cut.magnitude_db[i]);
      any = true;
    }
  }
  if (!any) {
    throw no_sidelobe_region("main lobe covers the entire grid");
  }
  return level;
}

}  // namespace synth
