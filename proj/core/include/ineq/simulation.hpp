#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ineq/kinetic.hpp"
#include "ineq/rng.hpp"

namespace ineq::kinetic {

// Draws an ordered pair (i, j), i != j, uniformly and one exchange amount per
// the rule, then applies the transfer unless the payer would fall below the
// floor. Returns whether the transfer was accepted.
bool exchange_step(AgentEnsemble& ensemble, const ExchangeRule& rule, Rng& rng);

// Same, with a fixed payer and receiver; only the amount is drawn.
bool exchange_between(AgentEnsemble& ensemble, const ExchangeRule& rule, std::size_t payer,
                      std::size_t receiver, Rng& rng);

struct Checkpoint {
  std::uint64_t step;
  double entropy;
  double temperature;
};

struct SimulationOptions {
  std::uint64_t steps = 0;
  std::uint64_t checkpoint_every = 0;  // 0: only the first and last step
  std::uint64_t seed = 0;
  Quanta bin_quanta = 1;
};

struct Trajectory {
  std::vector<Checkpoint> checkpoints;
  BinnedHistogram final_histogram;
  std::uint64_t accepted = 0;
  std::uint64_t conservation_checks = 0;
};

// Runs `steps` exchange steps. Entropy (at bin width bin_quanta) and
// temperature are recorded at step 0, every checkpoint_every steps and at the
// last step. The integer money sum is re-counted at every checkpoint; a
// mismatch throws std::logic_error. Throws ConfigError for steps == 0.
Trajectory run_simulation(AgentEnsemble& ensemble, const ExchangeRule& rule,
                          const SimulationOptions& options);

// Kolmogorov-Smirnov distance between the balances and an exponential with
// mean `temperature` (in quanta), measured on the money axis offset by the
// rule floor. Balances are lattice-valued, so the empirical CCDF
// #{m >= k}/N is compared with exp(-k/T) at the integer bin edges k.
double ks_distance_exponential(const AgentEnsemble& ensemble, double temperature,
                               Quanta floor = 0);

// N (1 + ln(T/m*)): entropy of the continuous exponential occupation with bin
// width m*.
double equilibrium_entropy(std::size_t agents, double temperature, double bin_width);

// JSON run configuration:
// {n_agents, total_money_quanta, quantum_value, rule, delta, floor, steps,
//  seed, checkpoint_every}; rule is "fixed" or "uniform".
struct SimulationConfig {
  std::size_t n_agents = 0;
  Quanta total_money_quanta = 0;
  double quantum_value = 1.0;
  ExchangeRule rule;
  std::uint64_t steps = 0;
  std::uint64_t seed = 0;
  std::uint64_t checkpoint_every = 0;
};

SimulationConfig parse_simulation_config(const std::string& json_text);
std::string to_json(const SimulationConfig& config);

// CSV writers: `step,entropy,temperature` and `bin_lower,count`.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);
void write_histogram_csv(std::ostream& out, const BinnedHistogram& hist);

}  // namespace ineq::kinetic
