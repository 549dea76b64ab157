#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "synth/array_model.hpp"
#include "synth/cuckoo.hpp"
#include "synth/errors.hpp"
#include "synth/synthesis.hpp"

namespace synth::io {

/// Shortest decimal form that parses back to the identical double.
inline std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

inline std::optional<double> parse_double(std::string_view text) {
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

inline std::optional<long long> parse_integer(std::string_view text) {
  long long value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

/// Configuration or file-format problem, annotated with where it was found.
class config_error : public std::runtime_error {
 public:
  config_error(std::string message, int line = 0, int column = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ", column " +
                                          std::to_string(column) + ": " + message
                                    : message),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Everything a synthesis run needs, as read from a config file plus flag
/// overrides. Mirrors SynthesisSpec with output orchestration on top.
struct RunSettings {
  int m = 0;  // required
  int n = 0;  // required
  double dx = 0.5;
  double dy = 0.5;
  double phi = 0.0;
  int theta_points = 1801;
  double theta_min = 0.0;
  double theta_max = 180.0;
  AngleConvention convention = AngleConvention::BroadsideAt90;
  Symmetry symmetry = Symmetry::Quadrant;
  bool taper_monotone = false;
  double amp_lower = 0.0;
  double amp_upper = 1.0;
  int population = 25;
  double pa = 0.25;
  double alpha = 0.01;
  double levy_exponent = 1.5;
  int iterations = 500;
  bool raw_levy = false;
  int eval_threads = 1;
  std::vector<std::uint64_t> seeds = {1};
  std::string out = ".";

  SynthesisSpec to_spec(std::uint64_t seed) const {
    SynthesisSpec spec;
    spec.geometry = ArrayGeometry{m, n, dx, dy};
    spec.cut_phi_deg = phi;
    spec.theta_grid = ThetaGrid{theta_points, theta_min, theta_max};
    spec.convention = convention;
    spec.symmetry = symmetry;
    spec.taper_monotone = taper_monotone;
    spec.amplitude_bounds = cuckoo::Interval{amp_lower, amp_upper};
    spec.csa = cuckoo::CsaConfig{population, pa,       alpha,        levy_exponent,
                                 iterations, seed,     raw_levy,     eval_threads};
    return spec;
  }
};

namespace detail {

struct RawEntry {
  std::string value;
  int line = 0;
  int column = 0;
};

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "m",          "n",         "dx",           "dy",          "phi",
      "theta_points", "theta_min", "theta_max",  "convention",  "symmetry",
      "taper_monotone", "amp_lower", "amp_upper", "population", "pa",
      "alpha",      "levy_exponent", "iterations", "seed",      "seeds",
      "raw_levy",   "eval_threads", "out"};
  return keys;
}

inline std::map<std::string, RawEntry> tokenize_config(std::string_view text) {
  std::map<std::string, RawEntry> entries;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    ++line_no;

    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string_view stripped = trim(line);
    if (!stripped.empty()) {
      const std::size_t eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw config_error("expected 'key = value'", line_no, 1);
      }
      const std::string_view key = trim(line.substr(0, eq));
      const std::string_view value = trim(line.substr(eq + 1));
      const int key_col = static_cast<int>(line.find_first_not_of(" \t")) + 1;
      const int value_col = value.empty()
                                ? static_cast<int>(eq) + 2
                                : static_cast<int>(line.find(value, eq + 1)) + 1;
      if (key.empty()) throw config_error("missing key before '='", line_no, key_col);
      const std::string key_str(key);
      const auto& known = known_keys();
      if (std::find(known.begin(), known.end(), key_str) == known.end()) {
        throw config_error("unknown key '" + key_str + "'", line_no, key_col);
      }
      if (entries.count(key_str) != 0) {
        throw config_error("duplicate key '" + key_str + "'", line_no, key_col);
      }
      if (value.empty()) throw config_error("empty value for '" + key_str + "'", line_no, value_col);
      entries[key_str] = RawEntry{std::string(value), line_no, value_col};
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return entries;
}

inline double require_double(const RawEntry& e, const std::string& key) {
  const auto v = parse_double(e.value);
  if (!v) throw config_error("value of '" + key + "' is not a number", e.line, e.column);
  return *v;
}

inline int require_int(const RawEntry& e, const std::string& key) {
  const auto v = parse_integer(e.value);
  if (!v || *v < std::numeric_limits<int>::min() || *v > std::numeric_limits<int>::max()) {
    throw config_error("value of '" + key + "' is not an integer", e.line, e.column);
  }
  return static_cast<int>(*v);
}

inline bool require_bool(const RawEntry& e, const std::string& key) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  throw config_error("value of '" + key + "' must be true or false", e.line, e.column);
}

}  // namespace detail

inline const char* convention_name(AngleConvention c) {
  return c == AngleConvention::BroadsideAt90 ? "broadside90" : "broadside0";
}

inline const char* symmetry_name(Symmetry s) {
  return s == Symmetry::Quadrant ? "quadrant" : "none";
}

inline std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    const std::string_view token = detail::trim(text.substr(pos, comma - pos));
    std::uint64_t value = 0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
      throw config_error("seed list entry '" + std::string(token) + "' is not an unsigned integer");
    }
    seeds.push_back(value);
    pos = comma + 1;
    if (comma == text.size()) break;
  }
  if (seeds.empty()) throw config_error("seed list is empty");
  return seeds;
}

/// Parses the flat `key = value` run configuration. Unknown and duplicate
/// keys are rejected by name; every syntax problem reports line and column.
inline RunSettings parse_run_settings(std::string_view text) {
  const auto entries = detail::tokenize_config(text);
  RunSettings s;
  bool have_m = false, have_n = false;

  for (const auto& [key, entry] : entries) {
    if (key == "m") { s.m = detail::require_int(entry, key); have_m = true; }
    else if (key == "n") { s.n = detail::require_int(entry, key); have_n = true; }
    else if (key == "dx") s.dx = detail::require_double(entry, key);
    else if (key == "dy") s.dy = detail::require_double(entry, key);
    else if (key == "phi") s.phi = detail::require_double(entry, key);
    else if (key == "theta_points") s.theta_points = detail::require_int(entry, key);
    else if (key == "theta_min") s.theta_min = detail::require_double(entry, key);
    else if (key == "theta_max") s.theta_max = detail::require_double(entry, key);
    else if (key == "convention") {
      if (entry.value == "broadside90") s.convention = AngleConvention::BroadsideAt90;
      else if (entry.value == "broadside0") s.convention = AngleConvention::BroadsideAt0;
      else throw config_error("convention must be broadside90 or broadside0", entry.line, entry.column);
    } else if (key == "symmetry") {
      if (entry.value == "quadrant") s.symmetry = Symmetry::Quadrant;
      else if (entry.value == "none") s.symmetry = Symmetry::None;
      else throw config_error("symmetry must be quadrant or none", entry.line, entry.column);
    } else if (key == "taper_monotone") s.taper_monotone = detail::require_bool(entry, key);
    else if (key == "amp_lower") s.amp_lower = detail::require_double(entry, key);
    else if (key == "amp_upper") s.amp_upper = detail::require_double(entry, key);
    else if (key == "population") s.population = detail::require_int(entry, key);
    else if (key == "pa") s.pa = detail::require_double(entry, key);
    else if (key == "alpha") s.alpha = detail::require_double(entry, key);
    else if (key == "levy_exponent") s.levy_exponent = detail::require_double(entry, key);
    else if (key == "iterations") s.iterations = detail::require_int(entry, key);
    else if (key == "seed") {
      const auto v = parse_integer(entry.value);
      if (!v || *v < 0) throw config_error("value of 'seed' is not an unsigned integer", entry.line, entry.column);
      s.seeds = {static_cast<std::uint64_t>(*v)};
    } else if (key == "seeds") {
      try {
        s.seeds = parse_seed_list(entry.value);
      } catch (const config_error& e) {
        throw config_error(e.what(), entry.line, entry.column);
      }
    } else if (key == "raw_levy") s.raw_levy = detail::require_bool(entry, key);
    else if (key == "eval_threads") s.eval_threads = detail::require_int(entry, key);
    else if (key == "out") s.out = entry.value;
  }

  if (!have_m || !have_n) {
    throw config_error(std::string("missing required key '") + (have_m ? "n" : "m") + "'");
  }
  if (entries.count("seed") && entries.count("seeds")) {
    throw config_error("give either 'seed' or 'seeds', not both");
  }
  return s;
}

inline RunSettings load_run_settings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_settings(buf.str());
}

// ---------------------------------------------------------------------------
// artifact writers / readers
// ---------------------------------------------------------------------------

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
}

inline std::string pattern_csv(const PatternCut& cut) {
  std::string text = "theta_deg,magnitude_db\n";
  for (std::size_t i = 0; i < cut.theta_deg.size(); ++i) {
    text += format_double(cut.theta_deg[i]);
    text += ',';
    text += format_double(cut.magnitude_db[i]);
    text += '\n';
  }
  return text;
}

inline std::string convergence_csv(const cuckoo::RunResult& run) {
  std::string text = "iteration,best_objective_db,fitness_delta_db\n";
  for (std::size_t i = 0; i < run.best_history.size(); ++i) {
    text += std::to_string(i + 1);
    text += ',';
    text += format_double(run.best_history[i]);
    text += ',';
    text += format_double(run.fitness_deltas[i]);
    text += '\n';
  }
  return text;
}

inline std::string excitation_csv(const ExcitationMatrix& excitation) {
  std::string text;
  for (std::size_t m = 0; m < excitation.rows(); ++m) {
    for (std::size_t n = 0; n < excitation.cols(); ++n) {
      if (n > 0) text += ',';
      text += format_double(excitation.at(m, n));
    }
    text += '\n';
  }
  return text;
}

/// Headerless comma-separated amplitude grid, one row of the array per line.
inline ExcitationMatrix read_excitation_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open excitation file '" + path.string() + "'");
  std::vector<double> values;
  std::size_t rows = 0, cols = 0;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view stripped = detail::trim(line);
    if (stripped.empty()) continue;
    std::size_t row_cols = 0;
    std::size_t pos = 0;
    const std::string_view sv = stripped;
    while (pos <= sv.size()) {
      std::size_t comma = sv.find(',', pos);
      if (comma == std::string_view::npos) comma = sv.size();
      const std::string_view token = detail::trim(sv.substr(pos, comma - pos));
      const auto v = parse_double(token);
      if (!v) {
        throw config_error("excitation entry '" + std::string(token) + "' is not a number",
                           line_no, static_cast<int>(pos) + 1);
      }
      values.push_back(*v);
      ++row_cols;
      pos = comma + 1;
      if (comma == sv.size()) break;
    }
    if (cols == 0) cols = row_cols;
    if (row_cols != cols) {
      throw config_error("excitation row has " + std::to_string(row_cols) +
                             " entries, expected " + std::to_string(cols),
                         line_no, 1);
    }
    ++rows;
  }
  if (rows == 0) throw config_error("excitation file '" + path.string() + "' is empty");
  return ExcitationMatrix(rows, cols, std::move(values));
}

inline nlohmann::ordered_json settings_json(const RunSettings& s) {
  nlohmann::ordered_json j;
  j["m"] = s.m;
  j["n"] = s.n;
  j["dx"] = s.dx;
  j["dy"] = s.dy;
  j["phi"] = s.phi;
  j["theta_points"] = s.theta_points;
  j["theta_min"] = s.theta_min;
  j["theta_max"] = s.theta_max;
  j["convention"] = convention_name(s.convention);
  j["symmetry"] = symmetry_name(s.symmetry);
  j["taper_monotone"] = s.taper_monotone;
  j["amp_lower"] = s.amp_lower;
  j["amp_upper"] = s.amp_upper;
  j["population"] = s.population;
  j["pa"] = s.pa;
  j["alpha"] = s.alpha;
  j["levy_exponent"] = s.levy_exponent;
  j["iterations"] = s.iterations;
  j["raw_levy"] = s.raw_levy;
  // eval_threads is execution orchestration, not result configuration: runs
  // are byte-identical for any value, so it stays out of the echo.
  return j;
}

/// Full result record: effective configuration, seed, measured quantities and
/// the winning excitation. A run is reproducible from this file alone.
inline std::string result_json(const RunSettings& settings, std::uint64_t seed,
                               const SynthesisResult& result) {
  nlohmann::ordered_json j;
  j["config"] = settings_json(settings);
  j["seed"] = seed;
  j["sll_db"] = result.sll_db;
  j["main_lobe"] = {{"theta_low_deg", result.main_lobe.theta_low_deg},
                    {"theta_high_deg", result.main_lobe.theta_high_deg}};
  j["best_objective_db"] = result.run.best_objective;
  j["iterations_executed"] = result.run.iterations_executed;
  nlohmann::ordered_json grid = nlohmann::ordered_json::array();
  for (std::size_t m = 0; m < result.best_excitation.rows(); ++m) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (std::size_t n = 0; n < result.best_excitation.cols(); ++n) {
      row.push_back(result.best_excitation.at(m, n));
    }
    grid.push_back(std::move(row));
  }
  j["excitation"] = std::move(grid);
  return j.dump(2) + "\n";
}

struct SeedSummary {
  std::uint64_t seed;
  double sll_db;
  LobeInterval main_lobe;
};

inline std::string summary_csv(const std::vector<SeedSummary>& rows) {
  std::string text = "seed,sll_db,main_lobe_low_deg,main_lobe_high_deg\n";
  for (const auto& row : rows) {
    text += std::to_string(row.seed);
    text += ',';
    text += format_double(row.sll_db);
    text += ',';
    text += format_double(row.main_lobe.theta_low_deg);
    text += ',';
    text += format_double(row.main_lobe.theta_high_deg);
    text += '\n';
  }
  return text;
}

}  // namespace synth::io
