#pragma once

#include <stdexcept>
#include <string>

namespace synth {

/// Violated precondition: mismatched dimensions, malformed grids, parameters
/// outside their documented ranges.
class contract_violation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Excitation with no strictly positive amplitude; the radiation pattern is
/// undefined for it.
class degenerate_excitation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The main lobe covers the whole sampled grid, leaving no samples to measure
/// a side lobe level from.
class no_sidelobe_region : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace synth
