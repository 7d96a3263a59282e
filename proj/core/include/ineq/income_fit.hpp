#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ineq/lorenz.hpp"
#include "ineq/rng.hpp"
#include "ineq/two_class.hpp"
#include "ineq/weighted_cdf.hpp"

namespace ineq::income {

enum class CountMode {
  at_or_above,  // count of returns with income >= level (complementary counts)
  in_bin,       // count of returns in [level_n, level_{n+1}), last bin open-ended
};

// Tabulated income data at discrete levels (k$/year).
struct IncomeBinTable {
  int year = 0;
  CountMode mode = CountMode::in_bin;
  std::vector<double> levels;
  std::vector<double> counts;

  // Throws DomainError: empty, size mismatch, levels not strictly increasing,
  // negative counts, zero total, or (at_or_above) counts increasing.
  void validate() const;
  // Returns per bin [level_n, level_{n+1}); the last bin is open-ended.
  std::vector<double> bin_counts() const;
  double total_returns() const;
};

// Reads `level_kusd,returns_at_or_above` or `level_kusd,returns_in_bin`; the
// header selects the mode unless `mode` is given. Throws FormatError.
IncomeBinTable read_income_csv(std::istream& in, std::string_view source, int year,
                               std::optional<CountMode> mode = std::nullopt);
void write_income_csv(std::ostream& out, const IncomeBinTable& table);

// C_e(r_n) = returns with income >= r_n over all returns.
WeightedCDF empirical_cdf_income(const IncomeBinTable& table);

// Range of C_e values whose levels enter a fit.
struct Window {
  double lo;
  double hi;
};

inline constexpr Window kExponentialWindow{0.1, 0.95};
inline constexpr Window kTailWindow{0.001, 0.03};

struct ExponentialFit {
  double temperature;
  double prefactor;  // C ~ prefactor * exp(-r/T)
  double residual;   // mean-square deviation of ln C
  std::size_t points;
};

struct PowerLawFit {
  double alpha;
  double prefactor;  // C ~ prefactor * r^-alpha
  double residual;
  std::size_t points;
};

// Least squares of ln C_e against r over levels with C_e in the window.
// Throws InsufficientDataError for fewer than 3 points, NonPhysicalFitError
// for a non-negative slope.
ExponentialFit fit_temperature(const WeightedCDF& cdf, Window window = kExponentialWindow);

// Least squares of ln C_e against ln r over levels with C_e in the window
// (levels at r = 0 are skipped).
PowerLawFit fit_pareto_exponent(const WeightedCDF& cdf, Window window = kTailWindow);

// sum_n ln^2[C_t(r_n) / C_e(r_n)] over levels with C_e > 0.
double crossover_objective(const WeightedCDF& cdf, const TwoClassModel& model);

struct CrossoverFit {
  double r0;
  double residual;
  bool degenerate;     // pinned to the bracket edge, or r0 beyond the last level
  bool grid_fallback;  // objective was not unimodal on the bracket
};

// Minimizes crossover_objective over r0 in [T/10, 100 T] by golden section in
// ln r0 with T and alpha held fixed. If the bracket endpoints both beat an
// interior probe the objective is scanned on 1000 log-spaced points instead
// and the best grid cell refined.
CrossoverFit fit_crossover(const WeightedCDF& cdf, double temperature, double alpha);

struct FitOptions {
  Window exponential_window = kExponentialWindow;
  Window tail_window = kTailWindow;
  // After the staged fit, minimize the same objective jointly over
  // (T, alpha, r0), confined to T no larger than the binned mean income.
  bool joint_refine = false;
};

struct FitReport {
  int year = 0;
  double temperature = 0.0;
  double alpha = 0.0;
  double r0 = 0.0;
  std::optional<double> r_star;
  std::optional<double> upper_fraction;  // exp(-r*/T)
  double mean_income = 0.0;
  double f = 0.0;
  double gini = 0.0;            // (1 + f)/2
  double gini_empirical = 0.0;  // from the empirical Lorenz curve
  double residual = 0.0;        // crossover objective at the reported parameters
  bool degenerate = false;
  bool refined = false;
  ExponentialFit exponential;
  PowerLawFit power_law;
  LorenzCurve lorenz;
};

// Mean income from binned data: bin midpoints, with the open top bin placed at
// its power-law conditional mean alpha r_N / (alpha - 1). Throws
// NonPhysicalFitError for alpha <= 1.
double binned_mean_income(const IncomeBinTable& table, double tail_alpha);

// Lorenz points at every level from bin incomes (midpoints, top bin as above).
LorenzCurve empirical_lorenz_income(const IncomeBinTable& table, double tail_alpha);

// Temperature, exponent, crossover, then f = 1 - T/<r>, r* from the two
// staged fits, G = (1 + f)/2 and the empirical Lorenz curve. When T exceeds
// <r> by at most 5% (no tail beyond noise) f is set to 0 and the report is
// flagged degenerate; beyond that NonPhysicalFitError.
FitReport fit_report(const IncomeBinTable& table, const FitOptions& options = {});

std::string to_json(const FitReport& report);

// One line shaped like the published yearly table:
// year, T, alpha, r0, r*, f (%), G.
std::string table_row(const FitReport& report);
std::string table_header();

// Draws `samples` incomes from the model by inverse-CDF sampling and bins them
// at `levels` levels placed where the model CCDF equals
// 10^(log10(c_min) n/(levels-1)), n = 0..levels-1 (the first level is 0).
// Output is in in_bin mode.
IncomeBinTable synthesize_income_table(const TwoClassModel& model, std::size_t samples,
                                       std::size_t levels, double c_min, Rng& rng, int year = 0);

// Income r with model.ccdf(r) == c, by bisection. Throws DomainError unless
// 0 < c <= 1.
double ccdf_quantile(const TwoClassModel& model, double c);

}  // namespace ineq::income
