#include "ineq/energy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>

#include <fmt/format.h>

#include "ineq/csv.hpp"
#include "json.hpp"

namespace ineq::energy {
namespace {

struct RawRow {
  std::size_t line;
  std::string label;
  double value;
};

// country -> row for the requested year, in file order.
std::vector<std::pair<std::string, RawRow>> read_year(std::istream& in, std::string_view source,
                                                      int year, std::vector<DroppedRow>& dropped) {
  const csv::Table t = csv::read(in, source);
  const std::string src(source);
  const auto c_country = t.column("country");
  const auto c_year = t.column("year");
  const auto c_value = t.column("value");
  const auto c_label = t.column("label");
  if (!c_country || !c_year || !c_value)
    throw FormatError(src, 1, "header must contain country, year and value");

  std::vector<std::pair<std::string, RawRow>> out;
  std::map<std::string, std::size_t> seen;
  for (const auto& row : t.rows) {
    const std::string country = csv::trim(row.fields[*c_country]);
    const auto y = csv::parse_double(row.fields[*c_year]);
    if (!y || *y != std::floor(*y)) {
      dropped.push_back({src, row.line, country, "non-numeric year"});
      continue;
    }
    if (static_cast<int>(*y) != year) continue;
    if (country.empty()) {
      dropped.push_back({src, row.line, country, "missing country"});
      continue;
    }
    const std::string raw_value = csv::trim(row.fields[*c_value]);
    const auto v = csv::parse_double(raw_value);
    if (!v || !std::isfinite(*v)) {
      dropped.push_back({src, row.line, country, raw_value.empty() ? "missing value" : "non-numeric value"});
      continue;
    }
    if (seen.count(country)) {
      dropped.push_back({src, row.line, country, "duplicate country"});
      continue;
    }
    seen.emplace(country, out.size());
    std::string label = c_label ? csv::trim(row.fields[*c_label]) : std::string();
    out.push_back({country, {row.line, std::move(label), *v}});
  }
  return out;
}

struct FixtureCountry {
  const char* name;
  const char* label;
  std::array<double, 3> kw;          // 1990, 2000, 2005
  std::array<double, 3> population;  // millions
};

// Per-capita consumption from the published table; populations are rounded
// mid-year estimates.
constexpr std::array<FixtureCountry, 22> kFixture{{
    {"Australia", "AUS", {6.9, 7.7, 7.9}, {17.1, 19.2, 20.3}},
    {"Bahrain", "BHR", {13.0, 12.8, 14.9}, {0.50, 0.67, 0.73}},
    {"Brazil", "BRA", {1.2, 1.4, 1.5}, {149.4, 174.8, 186.0}},
    {"Canada", "CAN", {10.0, 10.9, 11.3}, {27.7, 30.7, 32.3}},
    {"China", "CHN", {1.0, 1.2, 1.7}, {1143.0, 1263.0, 1304.0}},
    {"Cuba", "CUB", {2.1, 1.4, 1.2}, {10.6, 11.1, 11.3}},
    {"France", "FRA", {5.3, 5.8, 6.0}, {56.7, 59.0, 61.0}},
    {"Germany", "DEU", {6.0, 5.6, 5.6}, {79.4, 82.2, 82.5}},
    {"Iceland", "ISL", {11.3, 15.3, 16.3}, {0.255, 0.281, 0.30}},
    {"India", "IND", {0.5, 0.6, 0.6}, {873.0, 1053.0, 1134.0}},
    {"Iran", "IRN", {1.6, 2.4, 3.1}, {56.4, 65.9, 69.5}},
    {"Israel", "ISR", {3.6, 4.2, 3.9}, {4.7, 6.3, 6.9}},
    {"Japan", "JPN", {4.8, 5.5, 5.5}, {123.5, 126.8, 127.8}},
    {"Kenya", "KEN", {0.7, 0.6, 0.7}, {23.4, 31.3, 35.6}},
    {"Kuwait", "KWT", {5.3, 12.2, 13.9}, {2.1, 1.9, 2.3}},
    {"Mexico", "MEX", {2.0, 2.0, 2.3}, {84.0, 98.0, 104.0}},
    {"Netherlands Antilles", "ANT", {10.4, 10.2, 11.9}, {0.19, 0.18, 0.19}},
    {"Russia", "RUS", {7.9, 5.6, 6.0}, {148.3, 146.6, 143.2}},
    {"Arab Emirates", "ARE", {16.1, 14.7, 15.2}, {1.8, 3.0, 4.1}},
    {"United Kingdom", "GBR", {4.9, 5.3, 5.2}, {57.2, 58.9, 60.2}},
    {"United States", "USA", {10.0, 10.8, 10.4}, {250.0, 282.2, 296.5}},
    {"Qatar", "QAT", {18.1, 25.6, 26.5}, {0.47, 0.59, 0.82}},
}};

constexpr std::array<int, 3> kFixtureYears{1990, 2000, 2005};
constexpr std::array<double, 3> kWorldAverage{2.2, 2.2, 2.3};

std::size_t fixture_index(int year) {
  for (std::size_t i = 0; i < kFixtureYears.size(); ++i)
    if (kFixtureYears[i] == year) return i;
  throw DomainError(fmt::format("no fixture for year {}", year));
}

}  // namespace

IngestResult ingest_wri(std::istream& energy_csv, std::istream& population_csv, int year,
                        bool per_capita, std::string_view energy_source,
                        std::string_view population_source) {
  IngestResult result;
  const auto energy = read_year(energy_csv, energy_source, year, result.dropped);
  const auto population = read_year(population_csv, population_source, year, result.dropped);

  std::map<std::string, const RawRow*> pop_by_country;
  for (const auto& [country, row] : population) pop_by_country.emplace(country, &row);
  std::map<std::string, bool> energy_countries;

  for (const auto& [country, row] : energy) {
    energy_countries.emplace(country, true);
    const auto it = pop_by_country.find(country);
    if (it == pop_by_country.end()) {
      result.dropped.push_back({std::string(energy_source), 0, country, "no population row"});
      continue;
    }
    const RawRow& pop = *it->second;
    if (!(pop.value > 0.0)) {
      result.dropped.push_back(
          {std::string(population_source), pop.line, country, "non-positive population"});
      continue;
    }
    if (row.value < 0.0) {
      result.dropped.push_back({std::string(energy_source), row.line, country, "negative energy"});
      continue;
    }
    CountryRecord rec;
    rec.name = country;
    rec.label = !row.label.empty() ? row.label : !pop.label.empty() ? pop.label : country;
    rec.year = year;
    rec.energy = row.value;
    rec.population = pop.value;
    rec.per_capita = per_capita;
    result.records.push_back(std::move(rec));
  }
  for (const auto& [country, row] : population) {
    if (!energy_countries.count(country))
      result.dropped.push_back({std::string(population_source), 0, country, "no energy row"});
  }
  if (result.records.empty())
    throw EmptyJoinError(fmt::format("no country has both energy and population data for {} "
                                     "({} rows dropped)",
                                     year, result.dropped.size()),
                         result.dropped);
  return result;
}

double per_capita_kw(const CountryRecord& r) {
  if (!(r.population > 0.0))
    throw DomainError(fmt::format("{}: population must be positive", r.name));
  if (!(r.energy >= 0.0)) throw DomainError(fmt::format("{}: energy must be non-negative", r.name));
  if (r.per_capita) return r.energy;
  const double joules_per_year = r.energy * 1000.0 * kJoulesPerToe;
  return joules_per_year / kSecondsPerYear / r.population / 1000.0;
}

std::vector<Consumption> sorted_consumption(const std::vector<CountryRecord>& records) {
  struct Keyed {
    Consumption c;
    const std::string* name;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(records.size());
  for (const auto& r : records) keyed.push_back({{r.label, per_capita_kw(r), r.population}, &r.name});
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    if (a.c.epsilon_kw != b.c.epsilon_kw) return a.c.epsilon_kw < b.c.epsilon_kw;
    if (a.c.label != b.c.label) return a.c.label < b.c.label;
    return *a.name < *b.name;
  });
  std::vector<Consumption> out;
  out.reserve(keyed.size());
  for (auto& k : keyed) out.push_back(std::move(k.c));
  return out;
}

WeightedCDF weighted_cdf(const std::vector<CountryRecord>& records) {
  if (records.empty()) throw DomainError("no records");
  const auto sorted = sorted_consumption(records);
  std::vector<double> eps, pop;
  for (const auto& c : sorted) {
    eps.push_back(c.epsilon_kw);
    pop.push_back(c.population);
  }
  return WeightedCDF(eps, pop);
}

double world_average(const std::vector<CountryRecord>& records) {
  return weighted_cdf(records).mean();
}

LorenzCurve lorenz_energy(const std::vector<CountryRecord>& records) {
  if (records.size() < 2) throw DomainError("a Lorenz curve needs at least two records");
  const auto sorted = sorted_consumption(records);
  double pop = 0.0;
  double use = 0.0;
  for (const auto& c : sorted) {
    pop += c.population;
    use += c.population * c.epsilon_kw;
  }
  if (!(use > 0.0)) throw MalformedCurveError("total consumption is zero");
  std::vector<LorenzPoint> pts{{0.0, 0.0}};
  double cx = 0.0;
  double cy = 0.0;
  for (const auto& c : sorted) {
    cx += c.population;
    cy += c.population * c.epsilon_kw;
    pts.push_back({cx / pop, cy / use});
  }
  return make_lorenz_curve(std::move(pts));
}

SlopeProfile slope_profile(const LorenzCurve& curve) {
  const auto& p = curve.points;
  if (p.size() < 3) throw DomainError("a slope profile needs at least three points");
  SlopeProfile out;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const double dx = p[i + 1].x - p[i].x;
    if (!(dx > 0.0)) continue;
    out.slopes.push_back((p[i + 1].y - p[i].y) / dx);
    out.x_right.push_back(p[i + 1].x);
  }
  for (std::size_t k = 0; k + 1 < out.slopes.size(); ++k) {
    const double jump = std::abs(out.slopes[k + 1] - out.slopes[k]);
    if (jump > out.max_jump) {
      out.max_jump = jump;
      out.kink_x = out.x_right[k];
    }
  }
  return out;
}

EnergySummary summarize(const std::vector<CountryRecord>& records, int year) {
  EnergySummary s;
  s.year = year;
  s.world_avg_kw = world_average(records);
  const auto curve = lorenz_energy(records);
  s.gini = curve.gini;
  s.kink_x = slope_profile(curve).kink_x;
  s.countries = records.size();
  return s;
}

std::string to_json(const EnergySummary& s) {
  nlohmann::ordered_json j;
  j["year"] = s.year;
  j["world_avg_kw"] = s.world_avg_kw;
  j["gini"] = s.gini;
  j["kink_x"] = s.kink_x;
  j["countries"] = s.countries;
  return j.dump(2);
}

void write_cdf_csv(std::ostream& out, const WeightedCDF& cdf) {
  out << "epsilon_kw,C\n";
  for (const auto& l : cdf.levels())
    out << csv::format_number(l.value) << ',' << csv::format_number(l.ccdf) << '\n';
}

void write_exponential_overlay_csv(std::ostream& out, const WeightedCDF& cdf, double temperature) {
  if (!(temperature > 0.0)) throw DomainError("overlay temperature must be positive");
  out << "epsilon_kw,C\n";
  for (const auto& l : cdf.levels())
    out << csv::format_number(l.value) << ',' << csv::format_number(std::exp(-l.value / temperature))
        << '\n';
}

std::vector<CountryRecord> table2_fixture(int year) {
  const std::size_t k = fixture_index(year);
  std::vector<CountryRecord> out;
  out.reserve(kFixture.size());
  for (const auto& c : kFixture)
    out.push_back({c.name, c.label, year, c.kw[k], c.population[k] * 1e6, true});
  return out;
}

double table2_world_average(int year) { return kWorldAverage[fixture_index(year)]; }

void write_fixture_csv(std::ostream& energy_out, std::ostream& population_out) {
  energy_out << "country,year,value,label\n";
  population_out << "country,year,value,label\n";
  for (std::size_t k = 0; k < kFixtureYears.size(); ++k) {
    for (const auto& c : kFixture) {
      energy_out << csv::escape(c.name) << ',' << kFixtureYears[k] << ','
                 << csv::format_number(c.kw[k]) << ',' << c.label << '\n';
      population_out << csv::escape(c.name) << ',' << kFixtureYears[k] << ','
                     << csv::format_number(c.population[k] * 1e6) << ',' << c.label << '\n';
    }
  }
}

}  // namespace ineq::energy
