// Command-line front end: runs excitation synthesis or standalone pattern
// evaluation and exports the results as CSV/JSON plot data.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "synth/array_model.hpp"
#include "synth/io.hpp"
#include "synth/synthesis.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct RunFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> seeds;
  std::optional<std::string> out;
  std::optional<double> pa;
  std::optional<int> iters;
  std::optional<int> pop;
  std::optional<double> phi;
  std::optional<std::string> size;
};

struct EvalFlags {
  std::string config;
  std::string excitation;
  std::optional<std::string> out;
};

void apply_run_flags(synth::io::RunSettings& settings, const RunFlags& flags) {
  if (flags.seed && flags.seeds) {
    throw synth::io::config_error("give either --seed or --seeds, not both");
  }
  if (flags.seed) settings.seeds = {*flags.seed};
  if (flags.seeds) settings.seeds = synth::io::parse_seed_list(*flags.seeds);
  if (flags.out) settings.out = *flags.out;
  if (flags.pa) settings.pa = *flags.pa;
  if (flags.iters) settings.iterations = *flags.iters;
  if (flags.pop) settings.population = *flags.pop;
  if (flags.phi) settings.phi = *flags.phi;
  if (flags.size) {
    const std::string& text = *flags.size;
    const std::size_t x = text.find('x');
    const auto m = synth::io::parse_integer(text.substr(0, x));
    const auto n = x == std::string::npos ? std::nullopt : synth::io::parse_integer(text.substr(x + 1));
    if (!m || !n || *m < 1 || *n < 1) {
      throw synth::io::config_error("--size expects MxN, e.g. 16x16");
    }
    settings.m = static_cast<int>(*m);
    settings.n = static_cast<int>(*n);
  }
}

void write_run_artifacts(const fs::path& dir, const synth::io::RunSettings& settings,
                         std::uint64_t seed, const synth::SynthesisResult& result) {
  fs::create_directories(dir);
  const auto grid = result.spec.theta_grid.points();
  const synth::PatternCut cut =
      synth::evaluate_cut(result.spec.geometry, result.best_excitation, result.spec.cut_phi_deg,
                          grid, result.spec.convention);
  synth::io::write_text_file(dir / "result.json", synth::io::result_json(settings, seed, result));
  synth::io::write_text_file(dir / "pattern.csv", synth::io::pattern_csv(cut));
  synth::io::write_text_file(dir / "convergence.csv", synth::io::convergence_csv(result.run));
  synth::io::write_text_file(dir / "excitation.csv",
                             synth::io::excitation_csv(result.best_excitation));
}

int cmd_run(const RunFlags& flags) {
  synth::io::RunSettings settings = synth::io::load_run_settings(flags.config);
  apply_run_flags(settings, flags);
  settings.to_spec(settings.seeds.front()).validate();

  const fs::path out_root = settings.out;
  const bool multi = settings.seeds.size() > 1;
  std::vector<synth::io::SeedSummary> summaries;
  for (const std::uint64_t seed : settings.seeds) {
    const synth::SynthesisSpec spec = settings.to_spec(seed);
    const synth::SynthesisResult result = synth::synthesize(spec);
    const fs::path dir = multi ? out_root / ("seed_" + std::to_string(seed)) : out_root;
    write_run_artifacts(dir, settings, seed, result);
    summaries.push_back({seed, result.sll_db, result.main_lobe});
    std::cout << "seed " << seed << ": SLL " << synth::io::format_double(result.sll_db)
              << " dB, main lobe [" << synth::io::format_double(result.main_lobe.theta_low_deg)
              << ", " << synth::io::format_double(result.main_lobe.theta_high_deg) << "] deg -> "
              << dir.string() << "\n";
  }
  if (multi) {
    fs::create_directories(out_root);
    synth::io::write_text_file(out_root / "summary.csv", synth::io::summary_csv(summaries));
  }
  return kExitOk;
}

int cmd_eval(const EvalFlags& flags) {
  synth::io::RunSettings settings = synth::io::load_run_settings(flags.config);
  if (flags.out) settings.out = *flags.out;
  const synth::ExcitationMatrix excitation = synth::io::read_excitation_csv(flags.excitation);
  if (excitation.rows() != static_cast<std::size_t>(settings.m) ||
      excitation.cols() != static_cast<std::size_t>(settings.n)) {
    std::cerr << "excitation dimensions mismatch: expected " << settings.m << "x" << settings.n
              << ", found " << excitation.rows() << "x" << excitation.cols() << "\n";
    return kExitUsage;
  }

  const synth::SynthesisSpec spec = settings.to_spec(settings.seeds.front());
  const auto grid = spec.theta_grid.points();
  const synth::PatternCut cut =
      synth::evaluate_cut(spec.geometry, excitation, spec.cut_phi_deg, grid, spec.convention);

  fs::create_directories(settings.out);
  synth::io::write_text_file(fs::path(settings.out) / "pattern.csv", synth::io::pattern_csv(cut));

  try {
    const synth::LobeInterval lobe = synth::locate_main_lobe(cut);
    const double sll = synth::compute_sll(cut, lobe);
    nlohmann::ordered_json j;
    j["sll_db"] = sll;
    j["main_lobe"] = {{"theta_low_deg", lobe.theta_low_deg},
                      {"theta_high_deg", lobe.theta_high_deg}};
    std::cout << j.dump() << "\n";
  } catch (const synth::no_sidelobe_region& e) {
    nlohmann::ordered_json j;
    j["error"] = "no-sidelobe-region";
    j["message"] = e.what();
    std::cout << j.dump() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planar array amplitude synthesis via cuckoo search"};
  app.require_subcommand(1);

  RunFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "synthesize an excitation and export artifacts");
  run->add_option("--config", run_flags.config, "run configuration file")->required();
  run->add_option("--seed", run_flags.seed, "single RNG seed");
  run->add_option("--seeds", run_flags.seeds, "comma-separated seed list for a multi-seed run");
  run->add_option("--out", run_flags.out, "output directory");
  run->add_option("--pa", run_flags.pa, "discovery probability");
  run->add_option("--iters", run_flags.iters, "iteration budget");
  run->add_option("--pop", run_flags.pop, "population size");
  run->add_option("--phi", run_flags.phi, "cut plane phi in degrees");
  run->add_option("--size", run_flags.size, "array size as MxN");

  EvalFlags eval_flags;
  CLI::App* eval = app.add_subcommand("eval", "evaluate a stored excitation grid");
  eval->add_option("--config", eval_flags.config, "run configuration file")->required();
  eval->add_option("--excitation", eval_flags.excitation, "headerless MxN amplitude CSV")->required();
  eval->add_option("--out", eval_flags.out, "output directory for pattern.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(run_flags);
    return cmd_eval(eval_flags);
  } catch (const synth::io::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const synth::contract_violation& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
