#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ineq/kinetic.hpp"
#include "ineq/rng.hpp"

namespace ineq::kinetic {

struct CouplingOptions {
  ExchangeRule rule;
  std::uint64_t steps = 0;
  // Probability that a step is a migration attempt; otherwise it is a
  // cross-system money exchange.
  double migration_rate = 0.0;
};

// Net fluxes from system 1 to system 2 and the linear-response entropy change
//   dS = (1/T2 - 1/T1) dM + ln(T2/T1) dN
// evaluated at the initial temperatures (in quanta).
struct FluxReport {
  Quanta money_flux = 0;          // dM, quanta moved 1 -> 2
  std::int64_t agent_flux = 0;    // dN, agents moved 1 -> 2
  double entropy_change = 0.0;
  double initial_temperature_1 = 0.0;
  double initial_temperature_2 = 0.0;
  std::uint64_t steps = 0;
  std::uint64_t exchanges_accepted = 0;
  std::uint64_t migrations_accepted = 0;
};

// Couples two ensembles for `steps` steps.
//
// Exchange step: an ordered (payer, receiver) pair with one agent in each
// system, uniform over all such pairs (the paying system is a fair coin); the
// amount follows the rule.
//
// Migration step: one agent drawn uniformly from all agents proposes to move,
// with its whole balance m, to the other system. The move from s to t is
// accepted with probability min(1, exp(dS)),
//   dS = m (1/T_t - 1/T_s) + ln(T_t / T_s),
// at the current temperatures. A system never drops below one agent, and no
// migration happens while either temperature is non-positive.
//
// Throws ConfigError for migration_rate outside [0, 1] or an invalid rule.
FluxReport couple_systems(AgentEnsemble& first, AgentEnsemble& second,
                          const CouplingOptions& options, Rng& rng);

// Runs independent replicas on copies of the two ensembles; replica r uses
// Rng(base_seed, r). Results are ordered by replica index and do not depend on
// the thread count.
std::vector<FluxReport> run_coupling_replicas(const AgentEnsemble& first,
                                              const AgentEnsemble& second,
                                              const CouplingOptions& options,
                                              std::size_t replicas, std::uint64_t base_seed,
                                              std::size_t threads = 0);

std::string to_json(const FluxReport& report);

}  // namespace ineq::kinetic
