#include "ineq/income_fit.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "ineq/csv.hpp"
#include "ineq/error.hpp"
#include "ineq/optimize.hpp"
#include "json.hpp"

namespace ineq::income {
namespace {

constexpr const char* kLevelColumn = "level_kusd";
constexpr const char* kAboveColumn = "returns_at_or_above";
constexpr const char* kBinColumn = "returns_in_bin";

// Income assigned to every bin: midpoints, the open top bin at the power-law
// conditional mean.
std::vector<double> bin_incomes(const IncomeBinTable& table, double tail_alpha) {
  if (!(tail_alpha > 1.0))
    throw NonPhysicalFitError(
        fmt::format("tail exponent {} <= 1 gives an unbounded top-bin mean", tail_alpha));
  const auto& r = table.levels;
  std::vector<double> m(r.size());
  for (std::size_t n = 0; n + 1 < r.size(); ++n) m[n] = 0.5 * (r[n] + r[n + 1]);
  m.back() = tail_alpha * r.back() / (tail_alpha - 1.0);
  return m;
}

double safe_log(double x) { return std::log(std::max(x, 1e-300)); }

}  // namespace

void IncomeBinTable::validate() const {
  if (levels.empty()) throw DomainError("income table is empty");
  if (levels.size() != counts.size()) throw DomainError("levels and counts differ in length");
  for (std::size_t n = 0; n < levels.size(); ++n) {
    if (!std::isfinite(levels[n]) || !std::isfinite(counts[n]))
      throw DomainError("income table holds a non-finite value");
    if (n > 0 && !(levels[n] > levels[n - 1]))
      throw DomainError(fmt::format("income levels not strictly increasing at row {}", n + 1));
    if (counts[n] < 0.0) throw DomainError(fmt::format("negative count at row {}", n + 1));
    if (mode == CountMode::at_or_above && n > 0 && counts[n] > counts[n - 1])
      throw DomainError(fmt::format("complementary counts increase at row {}", n + 1));
  }
  if (!(total_returns() > 0.0)) throw DomainError("income table has no returns");
}

std::vector<double> IncomeBinTable::bin_counts() const {
  if (mode == CountMode::in_bin) return counts;
  std::vector<double> out(counts.size());
  for (std::size_t n = 0; n < counts.size(); ++n)
    out[n] = n + 1 < counts.size() ? counts[n] - counts[n + 1] : counts[n];
  return out;
}

double IncomeBinTable::total_returns() const {
  if (counts.empty()) return 0.0;
  if (mode == CountMode::at_or_above) return counts.front();
  double s = 0.0;
  for (double c : counts) s += c;
  return s;
}

IncomeBinTable read_income_csv(std::istream& in, std::string_view source, int year,
                               std::optional<CountMode> mode) {
  const csv::Table t = csv::read(in, source);
  const std::string src(source);
  const auto level_col = t.column(kLevelColumn);
  if (!level_col) throw FormatError(src, 1, fmt::format("missing column '{}'", kLevelColumn));
  const auto above_col = t.column(kAboveColumn);
  const auto bin_col = t.column(kBinColumn);

  IncomeBinTable table;
  table.year = year;
  std::optional<std::size_t> count_col;
  if (mode) {
    table.mode = *mode;
    count_col = *mode == CountMode::at_or_above ? above_col : bin_col;
    if (!count_col && t.header.size() == 2) count_col = 1 - *level_col;
  } else if (above_col && !bin_col) {
    table.mode = CountMode::at_or_above;
    count_col = above_col;
  } else if (bin_col && !above_col) {
    table.mode = CountMode::in_bin;
    count_col = bin_col;
  }
  if (!count_col)
    throw FormatError(src, 1,
                      fmt::format("need exactly one of '{}' or '{}'", kAboveColumn, kBinColumn));

  for (const auto& row : t.rows) {
    const auto level = csv::parse_double(row.fields[*level_col]);
    const auto count = csv::parse_double(row.fields[*count_col]);
    if (!level || !count) throw FormatError(src, row.line, "non-numeric field");
    table.levels.push_back(*level);
    table.counts.push_back(*count);
  }
  try {
    table.validate();
  } catch (const DomainError& e) {
    throw FormatError(src, 0, e.what());
  }
  return table;
}

void write_income_csv(std::ostream& out, const IncomeBinTable& table) {
  out << kLevelColumn << ',' << (table.mode == CountMode::at_or_above ? kAboveColumn : kBinColumn)
      << '\n';
  for (std::size_t n = 0; n < table.levels.size(); ++n)
    out << csv::format_number(table.levels[n]) << ',' << csv::format_number(table.counts[n]) << '\n';
}

WeightedCDF empirical_cdf_income(const IncomeBinTable& table) {
  table.validate();
  const auto w = table.bin_counts();
  return WeightedCDF(table.levels, w);
}

ExponentialFit fit_temperature(const WeightedCDF& cdf, Window window) {
  std::vector<double> x, y;
  for (const auto& l : cdf.levels()) {
    if (l.ccdf > 0.0 && l.ccdf >= window.lo && l.ccdf <= window.hi) {
      x.push_back(l.value);
      y.push_back(std::log(l.ccdf));
    }
  }
  if (x.size() < 3)
    throw InsufficientDataError(fmt::format(
        "{} levels in the exponential window [{}, {}], need 3", x.size(), window.lo, window.hi));
  const auto line = opt::fit_line(x, y);
  if (!(line.slope < 0.0))
    throw NonPhysicalFitError(fmt::format("exponential fit slope {} is not negative", line.slope));
  return {-1.0 / line.slope, std::exp(line.intercept), line.mean_square_residual, x.size()};
}

PowerLawFit fit_pareto_exponent(const WeightedCDF& cdf, Window window) {
  std::vector<double> x, y;
  for (const auto& l : cdf.levels()) {
    if (l.value > 0.0 && l.ccdf > 0.0 && l.ccdf >= window.lo && l.ccdf <= window.hi) {
      x.push_back(std::log(l.value));
      y.push_back(std::log(l.ccdf));
    }
  }
  if (x.size() < 3)
    throw InsufficientDataError(fmt::format(
        "{} levels in the tail window [{}, {}], need 3", x.size(), window.lo, window.hi));
  const auto line = opt::fit_line(x, y);
  if (!(line.slope < 0.0))
    throw NonPhysicalFitError(fmt::format("power-law fit slope {} is not negative", line.slope));
  return {-line.slope, std::exp(line.intercept), line.mean_square_residual, x.size()};
}

double crossover_objective(const WeightedCDF& cdf, const TwoClassModel& model) {
  double sum = 0.0;
  for (const auto& l : cdf.levels()) {
    if (!(l.ccdf > 0.0)) continue;
    const double d = safe_log(model.ccdf(l.value)) - std::log(l.ccdf);
    sum += d * d;
  }
  return sum;
}

CrossoverFit fit_crossover(const WeightedCDF& cdf, double temperature, double alpha) {
  // Validates T and alpha before any search.
  TwoClassModel(temperature, alpha, temperature);
  const double lo = std::log(temperature / 10.0);
  const double hi = std::log(100.0 * temperature);
  auto objective = [&](double log_r0) {
    return crossover_objective(cdf, TwoClassModel(temperature, alpha, std::exp(log_r0)));
  };

  CrossoverFit out{};
  const double f_lo = objective(lo);
  const double f_hi = objective(hi);
  const double f_mid = objective(0.5 * (lo + hi));
  opt::Minimum1D best{};
  if (f_lo < f_mid && f_hi < f_mid) {
    out.grid_fallback = true;
    constexpr std::size_t kGrid = 1000;
    const double step = (hi - lo) / static_cast<double>(kGrid - 1);
    std::size_t arg = 0;
    double val = f_lo;
    for (std::size_t k = 1; k < kGrid; ++k) {
      const double v = k + 1 == kGrid ? f_hi : objective(lo + step * static_cast<double>(k));
      if (v < val) {
        val = v;
        arg = k;
      }
    }
    const double a = lo + step * static_cast<double>(arg == 0 ? 0 : arg - 1);
    const double b = lo + step * static_cast<double>(std::min(arg + 1, kGrid - 1));
    best = opt::golden_section(objective, a, b, 1e-9);
    if (!(best.value < val)) best = {lo + step * static_cast<double>(arg), val, 0};
  } else {
    best = opt::golden_section(objective, lo, hi, 1e-9);
    if (f_lo < best.value) best = {lo, f_lo, 0};
    if (f_hi < best.value) best = {hi, f_hi, 0};
  }
  constexpr double kEdge = 1e-3;
  out.r0 = std::exp(best.x);
  out.residual = best.value;
  // A crossover past the last observed level means the tail never touches
  // the data; noisy tail-free data often land there rather than on the edge.
  out.degenerate = best.x - lo < kEdge || hi - best.x < kEdge ||
                   out.r0 > cdf.levels().back().value;
  return out;
}

double binned_mean_income(const IncomeBinTable& table, double tail_alpha) {
  table.validate();
  const auto m = bin_incomes(table, tail_alpha);
  const auto w = table.bin_counts();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t n = 0; n < m.size(); ++n) {
    num += m[n] * w[n];
    den += w[n];
  }
  return num / den;
}

LorenzCurve empirical_lorenz_income(const IncomeBinTable& table, double tail_alpha) {
  table.validate();
  const auto m = bin_incomes(table, tail_alpha);
  const auto w = table.bin_counts();
  double pop = 0.0;
  double income = 0.0;
  for (std::size_t n = 0; n < m.size(); ++n) {
    pop += w[n];
    income += w[n] * m[n];
  }
  std::vector<LorenzPoint> pts{{0.0, 0.0}};
  double cx = 0.0;
  double cy = 0.0;
  for (std::size_t n = 0; n < m.size(); ++n) {
    if (w[n] == 0.0) continue;
    cx += w[n];
    cy += w[n] * m[n];
    pts.push_back({std::min(cx / pop, 1.0), std::min(cy / income, 1.0)});
  }
  pts.back() = {1.0, 1.0};
  return make_lorenz_curve(std::move(pts));
}

constexpr double kNoTailSlack = 0.05;

FitReport fit_report(const IncomeBinTable& table, const FitOptions& options) {
  const WeightedCDF cdf = empirical_cdf_income(table);
  FitReport rep;
  rep.year = table.year;
  rep.exponential = fit_temperature(cdf, options.exponential_window);
  rep.power_law = fit_pareto_exponent(cdf, options.tail_window);
  if (!(rep.power_law.alpha > 1.0))
    throw NonPhysicalFitError(
        fmt::format("fitted Pareto exponent {} does not exceed 1", rep.power_law.alpha));
  rep.temperature = rep.exponential.temperature;
  rep.alpha = rep.power_law.alpha;
  const CrossoverFit cross = fit_crossover(cdf, rep.temperature, rep.alpha);
  rep.r0 = cross.r0;
  rep.residual = cross.residual;
  rep.degenerate = cross.degenerate;

  if (options.joint_refine) {
    // Confined to T <= (1 + slack) <r>: beyond it f would be negative.
    auto admissible = [&](double t, double alpha) {
      return t <= (1.0 + kNoTailSlack) * binned_mean_income(table, alpha);
    };
    auto objective = [&](const std::vector<double>& x) {
      const double t = std::exp(x[0]);
      const double alpha = 1.0 + std::exp(x[1]);
      if (!admissible(t, alpha)) return std::numeric_limits<double>::infinity();
      return crossover_objective(cdf, TwoClassModel(t, alpha, std::exp(x[2])));
    };
    const auto m = opt::nelder_mead(objective,
                                    {std::log(rep.temperature), std::log(rep.alpha - 1.0),
                                     std::log(rep.r0)},
                                    0.05, 1e-12, 3000);
    if (m.value < rep.residual) {
      rep.temperature = std::exp(m.x[0]);
      rep.alpha = 1.0 + std::exp(m.x[1]);
      rep.r0 = std::exp(m.x[2]);
      rep.residual = m.value;
      rep.refined = true;
    }
  }

  try {
    const auto boundary = class_boundary(rep.exponential.temperature, rep.power_law.alpha,
                                         rep.exponential.prefactor, rep.power_law.prefactor);
    rep.r_star = boundary.income;
    rep.upper_fraction = boundary.upper_fraction;
  } catch (const NoIntersectionError&) {
    rep.degenerate = true;
  }

  rep.mean_income = binned_mean_income(table, rep.alpha);
  // Data without a tail put T at the mean up to binning and sampling noise;
  // a slightly negative f is read as no tail rather than as a failed fit.
  if (rep.temperature > rep.mean_income &&
      rep.temperature <= (1.0 + kNoTailSlack) * rep.mean_income) {
    rep.f = 0.0;
    rep.degenerate = true;
  } else {
    rep.f = tail_fraction(rep.temperature, rep.mean_income);
  }
  rep.gini = gini_two_class(rep.f);
  rep.lorenz = empirical_lorenz_income(table, rep.alpha);
  rep.gini_empirical = rep.lorenz.gini;
  return rep;
}

std::string to_json(const FitReport& r) {
  nlohmann::ordered_json j;
  j["year"] = r.year;
  j["T"] = r.temperature;
  j["alpha"] = r.alpha;
  j["r0"] = r.r0;
  j["r_star"] = r.r_star ? nlohmann::ordered_json(*r.r_star) : nlohmann::ordered_json(nullptr);
  j["upper_fraction"] =
      r.upper_fraction ? nlohmann::ordered_json(*r.upper_fraction) : nlohmann::ordered_json(nullptr);
  j["mean_income"] = r.mean_income;
  j["f"] = r.f;
  j["gini"] = r.gini;
  j["gini_empirical"] = r.gini_empirical;
  j["residual"] = r.residual;
  j["degenerate"] = r.degenerate;
  j["refined"] = r.refined;
  j["exponential_fit"] = {{"T", r.exponential.temperature},
                          {"prefactor", r.exponential.prefactor},
                          {"residual", r.exponential.residual},
                          {"points", r.exponential.points}};
  j["power_law_fit"] = {{"alpha", r.power_law.alpha},
                        {"prefactor", r.power_law.prefactor},
                        {"residual", r.power_law.residual},
                        {"points", r.power_law.points}};
  return j.dump(2);
}

std::string table_header() { return "year,T,alpha,r0,r_star,f_percent,G"; }

std::string table_row(const FitReport& r) {
  return fmt::format("{},{:.1f},{:.2f},{:.0f},{},{:.1f},{:.3f}", r.year, r.temperature, r.alpha,
                     r.r0, r.r_star ? fmt::format("{:.0f}", *r.r_star) : std::string(),
                     100.0 * r.f, r.gini);
}

double ccdf_quantile(const TwoClassModel& model, double c) {
  if (!(c > 0.0 && c <= 1.0)) throw DomainError(fmt::format("CCDF level {} outside (0, 1]", c));
  if (c == 1.0) return 0.0;
  double lo = 0.0;
  double hi = model.temperature();
  while (model.ccdf(hi) > c) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw RangeError("quantile beyond floating-point range");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (model.ccdf(mid) > c) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

IncomeBinTable synthesize_income_table(const TwoClassModel& model, std::size_t samples,
                                       std::size_t levels, double c_min, Rng& rng, int year) {
  if (levels < 2) throw DomainError("need at least two levels");
  if (samples == 0) throw DomainError("need at least one sample");
  if (!(c_min > 0.0 && c_min < 1.0)) throw DomainError("c_min must lie in (0, 1)");

  IncomeBinTable table;
  table.year = year;
  table.mode = CountMode::in_bin;
  table.levels.resize(levels);
  std::vector<double> c_at(levels);
  const double top = std::log10(c_min);
  for (std::size_t n = 0; n < levels; ++n) {
    const double c = n == 0 ? 1.0 : std::pow(10.0, top * static_cast<double>(n) / static_cast<double>(levels - 1));
    table.levels[n] = ccdf_quantile(model, c);
    c_at[n] = model.ccdf(table.levels[n]);
  }
  c_at[0] = 1.0;

  // A draw with CCDF value u lands in the last level n with C(r_n) >= u.
  table.counts.assign(levels, 0.0);
  for (std::size_t s = 0; s < samples; ++s) {
    const double u = 1.0 - rng.uniform();  // (0, 1]
    const auto it = std::upper_bound(c_at.begin(), c_at.end(), u, std::greater<double>());
    const auto n = static_cast<std::size_t>(it - c_at.begin()) - 1;
    table.counts[n] += 1.0;
  }
  return table;
}

}  // namespace ineq::income
