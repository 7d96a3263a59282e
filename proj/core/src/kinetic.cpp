#include "ineq/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "ineq/error.hpp"

namespace ineq::kinetic {

AgentEnsemble AgentEnsemble::equal_split(std::size_t agents, Quanta total_money,
                                         double quantum_value) {
  if (agents == 0) throw DomainError("ensemble needs at least one agent");
  if (total_money < 0) throw DomainError("total money must be non-negative");
  const auto n = static_cast<Quanta>(agents);
  std::vector<Quanta> balances(agents, total_money / n);
  const auto remainder = static_cast<std::size_t>(total_money % n);
  for (std::size_t i = 0; i < remainder; ++i) ++balances[i];
  return AgentEnsemble(std::move(balances), quantum_value);
}

AgentEnsemble::AgentEnsemble(std::vector<Quanta> balances, double quantum_value)
    : balances_(std::move(balances)), quantum_value_(quantum_value) {
  if (balances_.empty()) throw DomainError("ensemble needs at least one agent");
  if (!(quantum_value > 0.0)) throw DomainError("quantum value must be positive");
  total_ = recount();
}

Quanta AgentEnsemble::min_balance() const {
  return *std::min_element(balances_.begin(), balances_.end());
}

Quanta AgentEnsemble::recount() const {
  return std::accumulate(balances_.begin(), balances_.end(), Quanta{0});
}

bool AgentEnsemble::transfer(std::size_t payer, std::size_t receiver, Quanta amount, Quanta floor) {
  if (payer == receiver) return false;
  if (balances_[payer] - amount < floor) return false;
  balances_[payer] -= amount;
  balances_[receiver] += amount;
  return true;
}

void AgentEnsemble::adjust(std::size_t i, Quanta amount) {
  balances_[i] += amount;
  total_ += amount;
}

Quanta AgentEnsemble::remove_agent(std::size_t i) {
  if (balances_.size() <= 1) throw DomainError("cannot remove the last agent");
  const Quanta m = balances_[i];
  balances_[i] = balances_.back();
  balances_.pop_back();
  total_ -= m;
  return m;
}

void AgentEnsemble::add_agent(Quanta balance) {
  balances_.push_back(balance);
  total_ += balance;
}

void ExchangeRule::validate() const {
  if (delta < 1) throw ConfigError(fmt::format("exchange delta must be >= 1, got {}", delta));
  if (floor > 0) throw ConfigError(fmt::format("balance floor must be <= 0, got {}", floor));
}

std::int64_t BinnedHistogram::population() const {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

double BinnedHistogram::lower_edge(std::size_t k) const {
  return static_cast<double>(origin + static_cast<Quanta>(k) * bin_quanta) * quantum_value;
}

BinnedHistogram histogram(const AgentEnsemble& ensemble, Quanta bin_quanta) {
  if (bin_quanta < 1) throw DomainError("bin width must be at least one quantum");
  const auto floor_div = [](Quanta a, Quanta b) {
    Quanta q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
  };
  const auto [lo_it, hi_it] =
      std::minmax_element(ensemble.balances().begin(), ensemble.balances().end());
  BinnedHistogram hist;
  hist.bin_quanta = bin_quanta;
  hist.quantum_value = ensemble.quantum_value();
  hist.origin = floor_div(*lo_it, bin_quanta) * bin_quanta;
  const auto bins = static_cast<std::size_t>((*hi_it - hist.origin) / bin_quanta) + 1;
  hist.counts.assign(bins, 0);
  for (Quanta m : ensemble.balances()) {
    ++hist.counts[static_cast<std::size_t>((m - hist.origin) / bin_quanta)];
  }
  return hist;
}

double entropy(std::span<const std::int64_t> counts) {
  std::int64_t total = 0;
  for (auto c : counts) {
    if (c < 0) throw DomainError("negative occupation number");
    total += c;
  }
  if (total < 1) throw DomainError("entropy of an empty histogram");
  const double n = static_cast<double>(total);
  double s = 0.0;
  for (auto c : counts) {
    if (c > 0) {
      const double nk = static_cast<double>(c);
      s -= nk * std::log(nk / n);
    }
  }
  return s;
}

double entropy(const BinnedHistogram& hist) { return entropy(hist.counts); }

Multiplicity multiplicity_exact(std::span<const std::int64_t> occupations) {
  std::int64_t total = 0;
  for (auto c : occupations) {
    if (c < 0) throw DomainError("negative occupation number");
    total += c;
  }
  if (total > 20)
    throw RangeError(fmt::format("{} agents exceed the exact factorial range (20)", total));

  // N!/prod N_k! as a product of binomials C(n_1 + .. + n_k, n_k); every
  // partial product is itself an integer below 20!.
  std::uint64_t omega = 1;
  std::uint64_t placed = 0;
  for (auto c : occupations) {
    for (std::uint64_t i = 1; i <= static_cast<std::uint64_t>(c); ++i) {
      ++placed;
      omega = omega / i * placed + omega % i * placed / i;
    }
  }
  double log_omega = std::lgamma(static_cast<double>(total) + 1.0);
  for (auto c : occupations) log_omega -= std::lgamma(static_cast<double>(c) + 1.0);
  return {omega, log_omega};
}

Thermodynamics temperature_and_potential(const AgentEnsemble& ensemble, double bin_width) {
  if (!(bin_width > 0.0)) throw DomainError("bin width must be positive");
  const double t = static_cast<double>(ensemble.total()) / static_cast<double>(ensemble.size()) *
                   ensemble.quantum_value();
  Thermodynamics out{t, std::nullopt};
  if (t > 0.0) out.potential = -t * std::log(t / bin_width);
  return out;
}

CycleResult cycle_profit_and_rate(const CycleSpec& c) {
  if (!(c.temperature_low > 0.0)) throw DomainError("low temperature must be positive");
  if (c.temperature_high < 0.0) throw DomainError("temperatures must be non-negative");
  if (c.price_low < 0.0 || c.volume_low < 0.0) throw DomainError("prices and volumes must be >= 0");
  if (c.price_high < c.price_low) throw DomainError("selling price below buying price");
  if (c.volume_high < c.volume_low) throw DomainError("volume range reversed");
  return {(c.price_high - c.price_low) * (c.volume_high - c.volume_low),
          (c.temperature_high - c.temperature_low) / c.temperature_low};
}

}  // namespace ineq::kinetic
