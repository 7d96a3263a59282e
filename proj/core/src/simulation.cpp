#include "ineq/simulation.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "ineq/csv.hpp"
#include "ineq/error.hpp"
#include "json.hpp"

namespace ineq::kinetic {
namespace {

Quanta draw_amount(const ExchangeRule& rule, Rng& rng) {
  if (rule.kind == RuleKind::fixed_quantum) return rule.delta;
  return rng.between(1, rule.delta);
}

Checkpoint snapshot(std::uint64_t step, const AgentEnsemble& ensemble, Quanta bin_quanta) {
  const double t = static_cast<double>(ensemble.total()) / static_cast<double>(ensemble.size()) *
                   ensemble.quantum_value();
  return {step, entropy(histogram(ensemble, bin_quanta)), t};
}

}  // namespace

bool exchange_between(AgentEnsemble& ensemble, const ExchangeRule& rule, std::size_t payer,
                      std::size_t receiver, Rng& rng) {
  return ensemble.transfer(payer, receiver, draw_amount(rule, rng), rule.floor);
}

bool exchange_step(AgentEnsemble& ensemble, const ExchangeRule& rule, Rng& rng) {
  const std::uint64_t n = ensemble.size();
  if (n < 2) return false;
  const auto i = static_cast<std::size_t>(rng.below(n));
  auto j = static_cast<std::size_t>(rng.below(n - 1));
  if (j >= i) ++j;
  return exchange_between(ensemble, rule, i, j, rng);
}

Trajectory run_simulation(AgentEnsemble& ensemble, const ExchangeRule& rule,
                          const SimulationOptions& options) {
  rule.validate();
  if (options.steps == 0) throw ConfigError("simulation needs at least one step");
  if (ensemble.min_balance() < rule.floor)
    throw ConfigError("initial balances lie below the rule floor");

  Rng rng(options.seed);
  Trajectory out;
  const Quanta expected = ensemble.total();
  auto check = [&](std::uint64_t step) {
    ++out.conservation_checks;
    if (ensemble.recount() != expected) {
      throw std::logic_error(fmt::format("money not conserved at step {}", step));
    }
  };

  check(0);
  out.checkpoints.push_back(snapshot(0, ensemble, options.bin_quanta));
  const std::uint64_t every = options.checkpoint_every ? options.checkpoint_every : options.steps;
  std::uint64_t step = 0;
  while (step < options.steps) {
    const std::uint64_t chunk = std::min(every - step % every, options.steps - step);
    for (std::uint64_t s = 0; s < chunk; ++s) out.accepted += exchange_step(ensemble, rule, rng);
    step += chunk;
    check(step);
    out.checkpoints.push_back(snapshot(step, ensemble, options.bin_quanta));
  }
  out.final_histogram = histogram(ensemble, options.bin_quanta);
  return out;
}

double ks_distance_exponential(const AgentEnsemble& ensemble, double temperature, Quanta floor) {
  if (!(temperature > 0.0)) throw DomainError("temperature must be positive");
  std::vector<std::int64_t> counts;
  for (Quanta m : ensemble.balances()) {
    const Quanta k = m - floor;
    if (k < 0) throw DomainError("balance below floor");
    if (static_cast<std::size_t>(k) >= counts.size()) counts.resize(static_cast<std::size_t>(k) + 1, 0);
    ++counts[static_cast<std::size_t>(k)];
  }
  const double n = static_cast<double>(ensemble.size());
  double at_or_above = n;
  double worst = 0.0;
  // Edges k = 0 .. max + 1; beyond the largest balance the empirical CCDF is 0
  // and the analytic one only shrinks.
  for (std::size_t k = 0; k <= counts.size(); ++k) {
    const double model = std::exp(-static_cast<double>(k) / temperature);
    worst = std::max(worst, std::abs(at_or_above / n - model));
    if (k < counts.size()) at_or_above -= static_cast<double>(counts[k]);
  }
  return worst;
}

double equilibrium_entropy(std::size_t agents, double temperature, double bin_width) {
  return static_cast<double>(agents) * (1.0 + std::log(temperature / bin_width));
}

SimulationConfig parse_simulation_config(const std::string& json_text) {
  SimulationConfig c;
  try {
    const auto j = nlohmann::json::parse(json_text);
    c.n_agents = j.at("n_agents").get<std::size_t>();
    c.total_money_quanta = j.at("total_money_quanta").get<Quanta>();
    c.quantum_value = j.value("quantum_value", 1.0);
    const std::string rule = j.value("rule", std::string("fixed"));
    if (rule == "fixed") {
      c.rule.kind = RuleKind::fixed_quantum;
    } else if (rule == "uniform") {
      c.rule.kind = RuleKind::uniform_amount;
    } else {
      throw ConfigError(fmt::format("unknown exchange rule '{}'", rule));
    }
    c.rule.delta = j.value("delta", Quanta{1});
    c.rule.floor = j.value("floor", Quanta{0});
    c.steps = j.at("steps").get<std::uint64_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.checkpoint_every = j.value("checkpoint_every", std::uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("simulation config: {}", e.what()));
  }
  c.rule.validate();
  return c;
}

std::string to_json(const SimulationConfig& c) {
  nlohmann::ordered_json j;
  j["n_agents"] = c.n_agents;
  j["total_money_quanta"] = c.total_money_quanta;
  j["quantum_value"] = c.quantum_value;
  j["rule"] = c.rule.kind == RuleKind::fixed_quantum ? "fixed" : "uniform";
  j["delta"] = c.rule.delta;
  j["floor"] = c.rule.floor;
  j["steps"] = c.steps;
  j["seed"] = c.seed;
  j["checkpoint_every"] = c.checkpoint_every;
  return j.dump(2);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  out << "step,entropy,temperature\n";
  for (const auto& c : trajectory.checkpoints) {
    out << c.step << ',' << csv::format_number(c.entropy) << ','
        << csv::format_number(c.temperature) << '\n';
  }
}

void write_histogram_csv(std::ostream& out, const BinnedHistogram& hist) {
  out << "bin_lower,count\n";
  for (std::size_t k = 0; k < hist.counts.size(); ++k) {
    out << csv::format_number(hist.lower_edge(k)) << ',' << hist.counts[k] << '\n';
  }
}

}  // namespace ineq::kinetic
