#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ineq/error.hpp"
#include "ineq/lorenz.hpp"
#include "ineq/weighted_cdf.hpp"

namespace ineq::energy {

// 1 toe = 41.85e9 J; a year of 365.25 days.
inline constexpr double kJoulesPerToe = 41.85e9;
inline constexpr double kSecondsPerYear = 3.15576e7;

struct CountryRecord {
  std::string name;
  std::string label;  // short code; ties in consumption are broken by it
  int year = 0;
  // ktoe per year, or kW per person when per_capita is set.
  double energy = 0.0;
  double population = 0.0;
  bool per_capita = false;
};

struct DroppedRow {
  std::string source;
  std::size_t line;  // 0 for join misses
  std::string country;
  std::string reason;
};

struct IngestResult {
  std::vector<CountryRecord> records;
  std::vector<DroppedRow> dropped;
};

class EmptyJoinError : public Error {
 public:
  EmptyJoinError(const std::string& what, std::vector<DroppedRow> dropped)
      : Error(what), dropped_(std::move(dropped)) {}
  const std::vector<DroppedRow>& dropped() const noexcept { return dropped_; }

 private:
  std::vector<DroppedRow> dropped_;
};

// Reads two `country,year,value` CSVs (an optional `label` column is
// honoured) and inner-joins them on country name for `year`. Rows with missing
// or non-numeric values, non-positive population or negative energy, and
// countries present in only one file are dropped and reported. Throws
// FormatError for unparseable files and EmptyJoinError when nothing joins.
IngestResult ingest_wri(std::istream& energy_csv, std::istream& population_csv, int year,
                        bool per_capita = false, std::string_view energy_source = "energy",
                        std::string_view population_source = "population");

// kW per person. Throws DomainError for population <= 0 or negative energy.
double per_capita_kw(const CountryRecord& record);

struct Consumption {
  std::string label;
  double epsilon_kw;
  double population;
};

// Ascending by consumption, ties by label then name: the canonical order of
// every output below.
std::vector<Consumption> sorted_consumption(const std::vector<CountryRecord>& records);

// C_e(eps_n) = sum_{k >= n} N_k / sum_k N_k. Throws DomainError when empty.
WeightedCDF weighted_cdf(const std::vector<CountryRecord>& records);

// Population-weighted mean consumption, the "temperature" of the exponential
// overlay exp(-eps/T).
double world_average(const std::vector<CountryRecord>& records);

// (0,0) followed by cumulative population and consumption shares. Throws
// DomainError for fewer than 2 records, MalformedCurveError when total
// consumption is zero.
LorenzCurve lorenz_energy(const std::vector<CountryRecord>& records);

struct SlopeProfile {
  std::vector<double> slopes;  // dy/dx per segment (zero-width segments skipped)
  std::vector<double> x_right;  // right end of each segment
  double kink_x = 0.0;          // x where consecutive slopes jump the most
  double max_jump = 0.0;
};

// Throws DomainError for fewer than 3 points.
SlopeProfile slope_profile(const LorenzCurve& curve);

struct EnergySummary {
  int year = 0;
  double world_avg_kw = 0.0;
  double gini = 0.0;
  double kink_x = 0.0;
  std::size_t countries = 0;
};

EnergySummary summarize(const std::vector<CountryRecord>& records, int year);
std::string to_json(const EnergySummary& summary);

// `epsilon_kw,C` rows for the empirical CCDF, and the exponential overlay
// exp(-eps/T) at the same points with T = world average.
void write_cdf_csv(std::ostream& out, const WeightedCDF& cdf);
void write_exponential_overlay_csv(std::ostream& out, const WeightedCDF& cdf, double temperature);

// Per-capita consumption (kW) of the 22 labelled countries for 1990, 2000 and
// 2005, weighted by approximate mid-year populations. Throws DomainError for
// other years.
std::vector<CountryRecord> table2_fixture(int year);
// The published world-average consumption per capita for the year (kW).
double table2_world_average(int year);
// The fixture as `country,year,value,label` CSVs (all three years).
void write_fixture_csv(std::ostream& energy_out, std::ostream& population_out);

}  // namespace ineq::energy
