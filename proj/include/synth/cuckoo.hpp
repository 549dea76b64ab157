#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "synth/errors.hpp"

namespace synth::cuckoo {

/// Per-dimension search interval.
struct Interval {
  double lower = 0.0;
  double upper = 1.0;
};

using Bounds = std::vector<Interval>;

/// Minimized objective over a bounded real vector. Must be a pure function
/// of its argument when eval_threads > 1.
using Objective = std::function<double(std::span<const double>)>;

struct CsaConfig {
  int population = 25;          ///< number of host nests
  double pa = 0.25;             ///< discovery probability: fraction of worst nests rebuilt
  double alpha = 0.01;          ///< step scale relative to the per-dimension span; 0 disables flights
  double levy_exponent = 1.5;   ///< power-law density exponent of step lengths, in (1, 3)
  int max_iterations = 500;     ///< sole stopping rule
  std::uint64_t seed = 1;
  bool raw_levy = false;        ///< step = alpha * levy * span instead of alpha * levy * (x - best)
  int eval_threads = 1;         ///< objective evaluation parallelism; never affects results

  void validate() const {
    if (population < 2) throw contract_violation("CsaConfig: population must be >= 2");
    if (!(pa >= 0.0 && pa <= 1.0)) throw contract_violation("CsaConfig: pa must lie in [0, 1]");
    if (!(alpha >= 0.0)) throw contract_violation("CsaConfig: alpha must be >= 0");
    if (!(levy_exponent > 1.0 && levy_exponent < 3.0)) {
      throw contract_violation("CsaConfig: levy_exponent must lie strictly inside (1, 3)");
    }
    if (max_iterations < 1) throw contract_violation("CsaConfig: max_iterations must be >= 1");
    if (eval_threads < 1) throw contract_violation("CsaConfig: eval_threads must be >= 1");
  }
};

/// Candidate solution with its cached objective value.
struct Nest {
  std::vector<double> position;
  double objective_value = 0.0;
};

struct RunResult {
  std::vector<double> best_position;
  double best_objective = 0.0;
  /// Best objective after each iteration; monotone non-increasing.
  std::vector<double> best_history;
  /// best_history[t] - best_history[t-1]; entry 0 is relative to the
  /// post-initialization best. All entries <= 0.
  std::vector<double> fitness_deltas;
  int iterations_executed = 0;
  std::uint64_t seed = 0;
};

/// Objective evaluation raised; carries which nest was being scored.
class objective_failure : public std::runtime_error {
 public:
  objective_failure(std::size_t nest_index, const std::string& message)
      : std::runtime_error(message), nest_index_(nest_index) {}
  std::size_t nest_index() const { return nest_index_; }

 private:
  std::size_t nest_index_;
};

/// Seedable random source. All draws happen on the coordinating thread, in a
/// fixed order, before any parallel objective evaluation starts.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() { return uniform_(engine_); }

  double uniform(double lower, double upper) {
    return std::uniform_real_distribution<double>(lower, upper)(engine_);
  }

  double gaussian() { return normal_(engine_); }

  std::size_t below(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

namespace detail {

inline void validate_bounds(const Bounds& bounds) {
  if (bounds.empty()) throw contract_violation("bounds must be non-empty");
  for (const auto& b : bounds) {
    if (!(b.lower < b.upper)) throw contract_violation("bounds require lower < upper");
  }
}

/// Numerator sigma of the two-Gaussian ratio step generator for a step-length
/// density with tail exponent levy_exponent.
inline double mantegna_sigma(double levy_exponent) {
  const double beta = levy_exponent - 1.0;
  const double num = std::tgamma(1.0 + beta) * std::sin(std::numbers::pi * beta / 2.0);
  const double den = std::tgamma((1.0 + beta) / 2.0) * beta * std::pow(2.0, (beta - 1.0) / 2.0);
  return std::pow(num / den, 1.0 / beta);
}

/// Evaluates f over candidates, spreading work across `threads` workers.
/// Candidates are fixed before evaluation, so scheduling cannot change any
/// result; failures are reported for the lowest failing index.
inline void evaluate_batch(const Objective& f, const std::vector<std::vector<double>>& candidates,
                           std::vector<double>& values, int threads) {
  const std::size_t count = candidates.size();
  values.resize(count);
  std::vector<std::exception_ptr> errors(count);
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        values[i] = f(candidates[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < count; i += workers) {
          try {
            values[i] = f(candidates[i]);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (errors[i]) {
      const std::string prefix = "objective failed for nest " + std::to_string(i) + ": ";
      try {
        std::rethrow_exception(errors[i]);
      } catch (const std::exception& e) {
        throw objective_failure(i, prefix + e.what());
      } catch (...) {
        throw objective_failure(i, prefix + "unknown error");
      }
    }
  }
}

inline std::size_t min_objective_index(const std::vector<Nest>& nests) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < nests.size(); ++i) {
    if (nests[i].objective_value < nests[best].objective_value) best = i;
  }
  return best;
}

}  // namespace detail

/// Vector of heavy-tailed step components drawn with the two-Gaussian ratio
/// method: u / |v|^(1/beta) with beta = levy_exponent - 1.
inline std::vector<double> levy_step(Rng& rng, double levy_exponent, std::size_t dimension) {
  if (!(levy_exponent > 1.0 && levy_exponent < 3.0)) {
    throw contract_violation("levy_step: exponent must lie strictly inside (1, 3)");
  }
  const double beta = levy_exponent - 1.0;
  const double sigma = detail::mantegna_sigma(levy_exponent);
  std::vector<double> step(dimension);
  for (std::size_t k = 0; k < dimension; ++k) {
    const double u = rng.gaussian() * sigma;
    const double v = rng.gaussian();
    step[k] = u / std::pow(std::fabs(v), 1.0 / beta);
  }
  return step;
}

/// Uniform random population over the bound box, with objectives cached.
inline std::vector<Nest> init_population(const CsaConfig& config, const Bounds& bounds,
                                         const Objective& objective, Rng& rng) {
  config.validate();
  detail::validate_bounds(bounds);
  const std::size_t dim = bounds.size();
  std::vector<std::vector<double>> positions(static_cast<std::size_t>(config.population));
  for (auto& pos : positions) {
    pos.resize(dim);
    for (std::size_t k = 0; k < dim; ++k) pos[k] = rng.uniform(bounds[k].lower, bounds[k].upper);
  }
  std::vector<double> values;
  detail::evaluate_batch(objective, positions, values, config.eval_threads);
  std::vector<Nest> nests(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    nests[i] = Nest{std::move(positions[i]), values[i]};
  }
  return nests;
}

/// New candidate from a flight off `nest`: position + alpha * levy * scale,
/// clamped into bounds. The scale is (position - best) unless raw_levy is set
/// or the nest is the best one, in which case the per-dimension span is used
/// so the best nest keeps exploring.
inline std::vector<double> propose_cuckoo(const Nest& nest, const Nest& best,
                                          const CsaConfig& config, const Bounds& bounds, Rng& rng) {
  const std::size_t dim = nest.position.size();
  if (best.position.size() != dim || bounds.size() != dim) {
    throw contract_violation("propose_cuckoo: dimension mismatch");
  }
  const auto levy = levy_step(rng, config.levy_exponent, dim);
  const bool at_best = nest.position == best.position;
  std::vector<double> candidate(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    const double span = bounds[k].upper - bounds[k].lower;
    const double scale =
        (config.raw_levy || at_best) ? span : nest.position[k] - best.position[k];
    double move = config.alpha * levy[k] * scale;
    if (std::isnan(move)) move = 0.0;  // 0 * inf from a degenerate ratio draw
    candidate[k] = std::clamp(nest.position[k] + move, bounds[k].lower, bounds[k].upper);
  }
  return candidate;
}

/// One optimizer iteration:
///  (a) propose one cuckoo per nest and challenge a uniformly random nest,
///      replacing it only on strict improvement;
///  (b) abandon the worst ceil(pa * population) nests (never the best one)
///      and rebuild each from a fresh uniform draw or a levy-perturbed
///      surviving nest, 50/50;
///  (c) update best to the minimum-objective nest.
/// All random draws precede evaluation, so eval_threads cannot change results.
inline void step_iteration(std::vector<Nest>& nests, Nest& best, const CsaConfig& config,
                           const Bounds& bounds, const Objective& objective, Rng& rng) {
  const std::size_t n = nests.size();
  if (n == 0) throw contract_violation("step_iteration: empty population");

  // (a) flights and random challenges
  std::vector<std::vector<double>> candidates(n);
  std::vector<std::size_t> challenged(n);
  for (std::size_t i = 0; i < n; ++i) {
    candidates[i] = propose_cuckoo(nests[i], best, config, bounds, rng);
    challenged[i] = rng.below(n);
  }
  std::vector<double> values;
  detail::evaluate_batch(objective, candidates, values, config.eval_threads);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = challenged[i];
    if (values[i] < nests[j].objective_value) {
      nests[j] = Nest{std::move(candidates[i]), values[i]};
    }
  }

  // (b) abandonment of the worst fraction, elite excluded
  const std::size_t quota =
      static_cast<std::size_t>(std::ceil(config.pa * static_cast<double>(n)));
  const std::size_t elite = detail::min_objective_index(nests);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return nests[a].objective_value > nests[b].objective_value;
  });
  std::vector<bool> abandoned(n, false);
  std::size_t chosen = 0;
  for (std::size_t idx : order) {
    if (chosen == quota) break;
    if (idx == elite) continue;
    abandoned[idx] = true;
    ++chosen;
  }
  std::vector<std::size_t> survivors;
  std::vector<std::size_t> rebuilt;
  for (std::size_t i = 0; i < n; ++i) (abandoned[i] ? rebuilt : survivors).push_back(i);

  if (!rebuilt.empty()) {
    const std::size_t dim = bounds.size();
    std::vector<std::vector<double>> fresh(rebuilt.size());
    for (std::size_t r = 0; r < rebuilt.size(); ++r) {
      fresh[r].resize(dim);
      if (rng.uniform01() < 0.5) {
        for (std::size_t k = 0; k < dim; ++k) {
          fresh[r][k] = rng.uniform(bounds[k].lower, bounds[k].upper);
        }
      } else {
        const Nest& source = nests[survivors[rng.below(survivors.size())]];
        const auto levy = levy_step(rng, config.levy_exponent, dim);
        for (std::size_t k = 0; k < dim; ++k) {
          const double span = bounds[k].upper - bounds[k].lower;
          fresh[r][k] = std::clamp(source.position[k] + config.alpha * levy[k] * span,
                                   bounds[k].lower, bounds[k].upper);
        }
      }
    }
    std::vector<double> fresh_values;
    detail::evaluate_batch(objective, fresh, fresh_values, config.eval_threads);
    for (std::size_t r = 0; r < rebuilt.size(); ++r) {
      nests[rebuilt[r]] = Nest{std::move(fresh[r]), fresh_values[r]};
    }
  }

  // (c) track the optimum nest
  const std::size_t top = detail::min_objective_index(nests);
  if (nests[top].objective_value < best.objective_value || best.position.empty()) {
    best = nests[top];
  }
}

/// Full run: uniform initialization followed by exactly max_iterations steps.
/// Deterministic for a fixed (config, bounds, objective, seed).
inline RunResult run_csa(const CsaConfig& config, const Bounds& bounds,
                         const Objective& objective) {
  config.validate();
  detail::validate_bounds(bounds);
  Rng rng(config.seed);

  std::vector<Nest> nests = init_population(config, bounds, objective, rng);
  Nest best = nests[detail::min_objective_index(nests)];

  RunResult result;
  result.seed = config.seed;
  result.best_history.reserve(static_cast<std::size_t>(config.max_iterations));
  result.fitness_deltas.reserve(static_cast<std::size_t>(config.max_iterations));

  double previous_best = best.objective_value;
  for (int iteration = 0; iteration < config.max_iterations; ++iteration) {
    try {
      step_iteration(nests, best, config, bounds, objective, rng);
    } catch (const objective_failure& e) {
      throw objective_failure(e.nest_index(),
                              "iteration " + std::to_string(iteration + 1) + ": " + e.what());
    }
    result.best_history.push_back(best.objective_value);
    result.fitness_deltas.push_back(best.objective_value - previous_best);
    previous_best = best.objective_value;
  }

  result.best_position = best.position;
  result.best_objective = best.objective_value;
  result.iterations_executed = config.max_iterations;
  return result;
}

}  // namespace synth::cuckoo
