#include "ineq/coupling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include <fmt/format.h>

#include "ineq/error.hpp"
#include "json.hpp"

namespace ineq::kinetic {
namespace {

double temperature_of(const AgentEnsemble& e) {
  return static_cast<double>(e.total()) / static_cast<double>(e.size());
}

Quanta draw_amount(const ExchangeRule& rule, Rng& rng) {
  if (rule.kind == RuleKind::fixed_quantum) return rule.delta;
  return rng.between(1, rule.delta);
}

}  // namespace

FluxReport couple_systems(AgentEnsemble& first, AgentEnsemble& second,
                          const CouplingOptions& options, Rng& rng) {
  options.rule.validate();
  if (!(options.migration_rate >= 0.0 && options.migration_rate <= 1.0))
    throw ConfigError(fmt::format("migration rate {} outside [0, 1]", options.migration_rate));

  FluxReport report;
  report.steps = options.steps;
  report.initial_temperature_1 = temperature_of(first);
  report.initial_temperature_2 = temperature_of(second);
  AgentEnsemble* systems[2] = {&first, &second};

  for (std::uint64_t step = 0; step < options.steps; ++step) {
    const std::uint64_t n1 = first.size();
    const std::uint64_t n_all = n1 + second.size();
    const bool migrate = options.migration_rate > 0.0 && rng.uniform() < options.migration_rate;
    // Migration: any agent may propose to move. Exchange: an ordered cross
    // pair uniformly, i.e. the paying side by a fair coin, so that system
    // size alone does not bias the flux.
    int src = 0;
    std::size_t idx = 0;
    if (migrate) {
      const std::uint64_t pick = rng.below(n_all);
      src = pick < n1 ? 0 : 1;
      idx = static_cast<std::size_t>(src == 0 ? pick : pick - n1);
    } else {
      src = static_cast<int>(rng.below(2));
      idx = static_cast<std::size_t>(rng.below(systems[src]->size()));
    }
    AgentEnsemble& from = *systems[src];
    AgentEnsemble& to = *systems[1 - src];
    const std::int64_t sign = src == 0 ? 1 : -1;

    if (migrate) {
      if (from.size() <= 1) continue;
      const double t_from = temperature_of(from);
      const double t_to = temperature_of(to);
      if (!(t_from > 0.0 && t_to > 0.0)) continue;
      const auto m = static_cast<double>(from.balance(idx));
      const double ds = m * (1.0 / t_to - 1.0 / t_from) + std::log(t_to / t_from);
      if (ds < 0.0 && !(rng.uniform() < std::exp(ds))) continue;
      const Quanta moved = from.remove_agent(idx);
      to.add_agent(moved);
      report.agent_flux += sign;
      report.money_flux += sign * moved;
      ++report.migrations_accepted;
    } else {
      const auto receiver = static_cast<std::size_t>(rng.below(to.size()));
      const Quanta amount = draw_amount(options.rule, rng);
      if (from.balance(idx) - amount < options.rule.floor) continue;
      from.adjust(idx, -amount);
      to.adjust(receiver, amount);
      report.money_flux += sign * amount;
      ++report.exchanges_accepted;
    }
  }

  const double t1 = report.initial_temperature_1;
  const double t2 = report.initial_temperature_2;
  if (t1 > 0.0 && t2 > 0.0) {
    report.entropy_change = (1.0 / t2 - 1.0 / t1) * static_cast<double>(report.money_flux) +
                            std::log(t2 / t1) * static_cast<double>(report.agent_flux);
  }
  return report;
}

std::vector<FluxReport> run_coupling_replicas(const AgentEnsemble& first,
                                              const AgentEnsemble& second,
                                              const CouplingOptions& options,
                                              std::size_t replicas, std::uint64_t base_seed,
                                              std::size_t threads) {
  std::vector<FluxReport> out(replicas);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(replicas, 1));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < replicas; r = next++) {
      AgentEnsemble a = first;
      AgentEnsemble b = second;
      Rng rng(base_seed, r);
      out[r] = couple_systems(a, b, options, rng);
    }
  };
  if (threads == 1) {
    worker();
    return out;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  return out;
}

std::string to_json(const FluxReport& r) {
  nlohmann::ordered_json j;
  j["delta_M_quanta"] = r.money_flux;
  j["delta_N"] = r.agent_flux;
  j["delta_S"] = r.entropy_change;
  j["T1_initial"] = r.initial_temperature_1;
  j["T2_initial"] = r.initial_temperature_2;
  j["steps"] = r.steps;
  j["exchanges_accepted"] = r.exchanges_accepted;
  j["migrations_accepted"] = r.migrations_accepted;
  return j.dump(2);
}

}  // namespace ineq::kinetic
