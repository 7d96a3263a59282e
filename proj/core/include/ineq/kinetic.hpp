#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace ineq::kinetic {

// Money is held in integer quanta so that conservation is exact.
using Quanta = std::int64_t;

// Per-agent money balances. The total is fixed at construction and only
// changes through add_agent/remove_agent (migration between systems).
class AgentEnsemble {
 public:
  // Equal division: floor(M/N) each, the first M mod N agents get one extra
  // quantum. Throws DomainError for N == 0 or M < 0. quantum_value is the
  // money represented by one quantum.
  static AgentEnsemble equal_split(std::size_t agents, Quanta total_money,
                                   double quantum_value = 1.0);

  // Throws DomainError for an empty vector or a non-positive quantum_value.
  explicit AgentEnsemble(std::vector<Quanta> balances, double quantum_value = 1.0);

  std::size_t size() const noexcept { return balances_.size(); }
  Quanta total() const noexcept { return total_; }
  double quantum_value() const noexcept { return quantum_value_; }
  std::span<const Quanta> balances() const noexcept { return balances_; }
  Quanta balance(std::size_t i) const { return balances_[i]; }
  Quanta min_balance() const;

  // Sum recomputed from the balances; equals total() whenever the ensemble is
  // consistent.
  Quanta recount() const;

  // Moves `amount` quanta from payer to receiver. Rejected (returns false,
  // state untouched) if the payer would drop below `floor` or payer == receiver.
  bool transfer(std::size_t payer, std::size_t receiver, Quanta amount, Quanta floor);

  // Adds `amount` (possibly negative) to agent i and to the total: one side of
  // a transfer with another ensemble. No floor check.
  void adjust(std::size_t i, Quanta amount);

  // Removes agent i (the last agent takes its slot) and returns its balance.
  Quanta remove_agent(std::size_t i);
  void add_agent(Quanta balance);

 private:
  std::vector<Quanta> balances_;
  Quanta total_ = 0;
  double quantum_value_ = 1.0;
};

enum class RuleKind {
  fixed_quantum,   // transfer exactly `delta` quanta
  uniform_amount,  // transfer a uniform integer amount in [1, delta]
};

struct ExchangeRule {
  RuleKind kind = RuleKind::fixed_quantum;
  Quanta delta = 1;
  // Lowest balance an agent may hold: 0 forbids debt, -d_max allows debt.
  Quanta floor = 0;

  // Throws ConfigError unless delta >= 1 and floor <= 0.
  void validate() const;
};

// Occupation counts of money bins [origin + k*width, origin + (k+1)*width),
// width expressed in quanta.
struct BinnedHistogram {
  Quanta origin = 0;
  Quanta bin_quanta = 1;
  double quantum_value = 1.0;
  std::vector<std::int64_t> counts;

  std::int64_t population() const;
  double bin_width() const { return static_cast<double>(bin_quanta) * quantum_value; }
  double lower_edge(std::size_t k) const;
};

// Bins start at the lowest balance rounded down to a multiple of bin_quanta.
// Throws DomainError for bin_quanta < 1.
BinnedHistogram histogram(const AgentEnsemble& ensemble, Quanta bin_quanta = 1);

// S = -sum_k N_k ln(N_k / N) (Stirling form of ln Omega), 0 ln 0 = 0.
// Throws DomainError when the histogram is empty.
double entropy(const BinnedHistogram& hist);
double entropy(std::span<const std::int64_t> counts);

struct Multiplicity {
  std::uint64_t omega;  // N! / prod N_k!
  double log_omega;
};

// Exact multinomial count of agent placements. Throws RangeError when
// sum N_k > 20 (beyond exact 64-bit factorials), DomainError for negative counts.
Multiplicity multiplicity_exact(std::span<const std::int64_t> occupations);

struct Thermodynamics {
  double temperature;                // T = M/N in money units
  std::optional<double> potential;   // mu = -T ln(T/m*); empty when T <= 0
};

// Throws DomainError for bin_width <= 0.
Thermodynamics temperature_and_potential(const AgentEnsemble& ensemble, double bin_width);

// Closed speculation/trade cycle in the (volume, price) plane: buy volume
// V2 - V1 at price P2, sell at P1.
struct CycleSpec {
  double price_high;   // P1
  double price_low;    // P2
  double volume_low;   // V1
  double volume_high;  // V2
  double temperature_high;  // T1
  double temperature_low;   // T2
};

struct CycleResult {
  double profit;  // closed-loop integral of V dP = (P1 - P2)(V2 - V1)
  double rate;    // (T1 - T2) / T2
};

// Throws DomainError for T2 <= 0, negative prices/volumes, P1 < P2 or V2 < V1.
CycleResult cycle_profit_and_rate(const CycleSpec& cycle);

// W = M + P V.
inline double wealth(double money, double price, double volume) { return money + price * volume; }

}  // namespace ineq::kinetic
