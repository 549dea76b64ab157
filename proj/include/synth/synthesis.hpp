#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "synth/array_model.hpp"
#include "synth/cuckoo.hpp"
#include "synth/errors.hpp"

namespace synth {

/// Structure imposed on the excitation grid while searching.
enum class Symmetry {
  None,      ///< every element amplitude is a free variable
  Quadrant,  ///< amplitudes mirrored across both axes; one quadrant is free
};

/// Objective value assigned to candidates whose pattern cannot be measured
/// (all-zero excitation, or a lobe covering the whole grid). Any feasible
/// side lobe level beats it.
inline constexpr double kDegenerateObjectiveDb = 1000.0;

struct SynthesisSpec {
  ArrayGeometry geometry;
  double cut_phi_deg = 0.0;
  ThetaGrid theta_grid{};
  AngleConvention convention = AngleConvention::BroadsideAt90;
  Symmetry symmetry = Symmetry::Quadrant;
  /// Pass amplitudes through a cumulative-minimum transform outward from the
  /// array center, forcing a density taper that never grows toward the edge.
  bool taper_monotone = false;
  cuckoo::Interval amplitude_bounds{0.0, 1.0};
  cuckoo::CsaConfig csa{};

  void validate() const {
    geometry.validate();
    (void)theta_grid.points();
    if (!(amplitude_bounds.lower >= 0.0 && amplitude_bounds.lower < amplitude_bounds.upper)) {
      throw contract_violation("SynthesisSpec: amplitude bounds require 0 <= lower < upper");
    }
    csa.validate();
  }
};

struct SynthesisResult {
  SynthesisSpec spec;
  ExcitationMatrix best_excitation;
  double sll_db = 0.0;
  LobeInterval main_lobe;
  cuckoo::RunResult run;
};

/// Number of free amplitude variables under the spec's symmetry mode.
inline std::size_t decision_dimension(const SynthesisSpec& spec) {
  const std::size_t m = static_cast<std::size_t>(spec.geometry.m_count);
  const std::size_t n = static_cast<std::size_t>(spec.geometry.n_count);
  if (spec.symmetry == Symmetry::Quadrant) {
    return ((m + 1) / 2) * ((n + 1) / 2);
  }
  return m * n;
}

namespace detail {

/// Outward index from the array center along one axis: 0 at the center
/// element(s), growing toward the edges, mirror-symmetric.
inline std::size_t outward_index(std::size_t i, std::size_t count) {
  const long long centered = 2 * static_cast<long long>(i) - static_cast<long long>(count) + 1;
  return static_cast<std::size_t>(std::llabs(centered)) / 2;
}

/// Running minimum from the center outward along both axes, so amplitudes
/// never increase away from the center.
inline void apply_monotone_taper(std::vector<double>& a, std::size_t rows, std::size_t cols) {
  const auto at = [&](std::size_t m, std::size_t n) -> double& { return a[m * cols + n]; };
  const std::size_t row_hi = rows / 2, row_lo = (rows - 1) / 2;
  for (std::size_t n = 0; n < cols; ++n) {
    for (std::size_t m = row_hi + 1; m < rows; ++m) at(m, n) = std::min(at(m, n), at(m - 1, n));
    for (std::size_t m = row_lo; m-- > 0;) at(m, n) = std::min(at(m, n), at(m + 1, n));
  }
  const std::size_t col_hi = cols / 2, col_lo = (cols - 1) / 2;
  for (std::size_t m = 0; m < rows; ++m) {
    for (std::size_t n = col_hi + 1; n < cols; ++n) at(m, n) = std::min(at(m, n), at(m, n - 1));
    for (std::size_t n = col_lo; n-- > 0;) at(m, n) = std::min(at(m, n), at(m, n + 1));
  }
}

}  // namespace detail

/// Maps a decision vector onto the full M x N amplitude grid. Quadrant
/// vectors are laid out row-major over outward indices, so entry 0 is the
/// center and the last entry is the corner; mirroring reproduces the grid.
inline ExcitationMatrix expand_excitation(std::span<const double> vector,
                                          const SynthesisSpec& spec) {
  const std::size_t dim = decision_dimension(spec);
  if (vector.size() != dim) {
    throw contract_violation("expand_excitation: vector has " + std::to_string(vector.size()) +
                             " entries but the spec needs " + std::to_string(dim));
  }
  const std::size_t rows = static_cast<std::size_t>(spec.geometry.m_count);
  const std::size_t cols = static_cast<std::size_t>(spec.geometry.n_count);
  std::vector<double> amplitudes(rows * cols);
  if (spec.symmetry == Symmetry::Quadrant) {
    const std::size_t qcols = (cols + 1) / 2;
    for (std::size_t m = 0; m < rows; ++m) {
      const std::size_t qm = detail::outward_index(m, rows);
      for (std::size_t n = 0; n < cols; ++n) {
        amplitudes[m * cols + n] = vector[qm * qcols + detail::outward_index(n, cols)];
      }
    }
  } else {
    std::copy(vector.begin(), vector.end(), amplitudes.begin());
  }
  if (spec.taper_monotone) {
    detail::apply_monotone_taper(amplitudes, rows, cols);
  }
  return ExcitationMatrix(rows, cols, std::move(amplitudes));
}

/// Objective minimized by the synthesis: the side lobe level in dB of the
/// configured phi-cut. Candidates whose pattern has no measurable side lobe
/// region score kDegenerateObjectiveDb.
inline cuckoo::Objective build_objective(const SynthesisSpec& spec) {
  spec.validate();
  auto grid = std::make_shared<const std::vector<double>>(spec.theta_grid.points());
  return [spec, grid](std::span<const double> vector) -> double {
    try {
      const ExcitationMatrix excitation = expand_excitation(vector, spec);
      const PatternCut cut =
          evaluate_cut(spec.geometry, excitation, spec.cut_phi_deg, *grid, spec.convention);
      return compute_sll(cut, locate_main_lobe(cut));
    } catch (const degenerate_excitation&) {
      return kDegenerateObjectiveDb;
    } catch (const no_sidelobe_region&) {
      return kDegenerateObjectiveDb;
    }
  };
}

/// Runs the cuckoo search over the amplitude box and re-measures the winner
/// through the array model, so the reported level never comes from a cache.
inline SynthesisResult synthesize(const SynthesisSpec& spec) {
  spec.validate();
  const cuckoo::Bounds bounds(decision_dimension(spec), spec.amplitude_bounds);
  cuckoo::RunResult run = cuckoo::run_csa(spec.csa, bounds, build_objective(spec));

  ExcitationMatrix excitation = expand_excitation(run.best_position, spec);
  const auto grid = spec.theta_grid.points();
  const PatternCut cut =
      evaluate_cut(spec.geometry, excitation, spec.cut_phi_deg, grid, spec.convention);
  const LobeInterval lobe = locate_main_lobe(cut);
  const double sll = compute_sll(cut, lobe);

  return SynthesisResult{spec, std::move(excitation), sll, lobe, std::move(run)};
}

}  // namespace synth
