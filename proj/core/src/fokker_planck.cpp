#include "ineq/fokker_planck.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>

#include <boost/math/quadrature/gauss.hpp>
#include <fmt/format.h>

#include "ineq/csv.hpp"
#include "ineq/error.hpp"
#include "json.hpp"

namespace ineq::fp {
namespace {

using Gauss8 = boost::math::quadrature::gauss<double, 8>;
using Gauss16 = boost::math::quadrature::gauss<double, 16>;

const char* kind_name(DiffusionKind k) {
  switch (k) {
    case DiffusionKind::additive: return "additive";
    case DiffusionKind::multiplicative: return "multiplicative";
    case DiffusionKind::combined: return "combined";
  }
  return "?";
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw DomainError(fmt::format("{} must be positive and finite, got {}", name, v));
}

// integral of A/B over [x0, x1]
double drift_ratio_integral(const DriftDiffusionSpec& s, double x0, double x1) {
  if (x1 == x0) return 0.0;
  return Gauss8::integrate([&](double x) { return s.drift(x) / s.diffusion(x); }, x0, x1);
}

// Same in ln r, for long stretches of the tail.
double drift_ratio_integral_log(const DriftDiffusionSpec& s, double x0, double x1) {
  const double y0 = std::log(x0);
  const double y1 = std::log(x1);
  const int panels = std::max(1, static_cast<int>(std::ceil((y1 - y0) / 0.5)));
  const double w = (y1 - y0) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    sum += Gauss8::integrate(
        [&](double y) {
          const double r = std::exp(y);
          return s.drift(r) / s.diffusion(r) * r;
        },
        y0 + p * w, y0 + (p + 1) * w);
  }
  return sum;
}

void check_increasing(std::span<const double> grid) {
  if (grid.size() < 2) throw ConfigError("grid needs at least two points");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) throw ConfigError("grid contains a non-finite point");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw ConfigError(fmt::format("grid not strictly increasing at index {}", i));
  }
}

void check_diffusion(const DriftDiffusionSpec& spec, std::span<const double> grid) {
  for (double r : grid) {
    if (!(spec.diffusion(r) > 0.0))
      throw SingularDiffusionError(fmt::format("diffusion vanishes at r = {}", r));
  }
}

}  // namespace

DriftDiffusionSpec::DriftDiffusionSpec(DiffusionKind kind, double A0, double B0, double a,
                                       double b)
    : kind_(kind), A0_(A0), B0_(B0), a_(a), b_(b) {}

DriftDiffusionSpec DriftDiffusionSpec::additive(double A0, double B0) {
  require_positive(A0, "A0");
  require_positive(B0, "B0");
  return {DiffusionKind::additive, A0, B0, 0.0, 0.0};
}

DriftDiffusionSpec DriftDiffusionSpec::multiplicative(double a, double b) {
  require_positive(a, "a");
  require_positive(b, "b");
  return {DiffusionKind::multiplicative, 0.0, 0.0, a, b};
}

DriftDiffusionSpec DriftDiffusionSpec::combined(double A0, double B0, double a, double b) {
  require_positive(A0, "A0");
  require_positive(B0, "B0");
  require_positive(a, "a");
  require_positive(b, "b");
  return {DiffusionKind::combined, A0, B0, a, b};
}

double DriftDiffusionSpec::temperature() const {
  if (kind_ == DiffusionKind::multiplicative)
    throw DomainError("a purely multiplicative spec has no temperature");
  return B0_ / A0_;
}

double DriftDiffusionSpec::crossover() const {
  if (kind_ != DiffusionKind::combined) throw DomainError("crossover needs a combined spec");
  return std::sqrt(B0_ / b_);
}

double DriftDiffusionSpec::pareto_exponent() const {
  if (kind_ == DiffusionKind::additive) throw DomainError("an additive spec has no power-law tail");
  return 1.0 + a_ / b_;
}

std::string to_json(const DriftDiffusionSpec& spec) {
  nlohmann::ordered_json j;
  j["kind"] = kind_name(spec.kind());
  j["A0"] = spec.A0();
  j["B0"] = spec.B0();
  j["a"] = spec.a();
  j["b"] = spec.b();
  return j.dump(2);
}

DriftDiffusionSpec spec_from_json(const std::string& text) {
  nlohmann::json j;
  std::string kind;
  double A0 = 0, B0 = 0, a = 0, b = 0;
  try {
    j = nlohmann::json::parse(text);
    kind = j.at("kind").get<std::string>();
    A0 = j.value("A0", 0.0);
    B0 = j.value("B0", 0.0);
    a = j.value("a", 0.0);
    b = j.value("b", 0.0);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("drift/diffusion spec: {}", e.what()));
  }
  try {
    if (kind == "additive") return DriftDiffusionSpec::additive(A0, B0);
    if (kind == "multiplicative") return DriftDiffusionSpec::multiplicative(a, b);
    if (kind == "combined") return DriftDiffusionSpec::combined(A0, B0, a, b);
  } catch (const DomainError& e) {
    throw ConfigError(fmt::format("drift/diffusion spec: {}", e.what()));
  }
  throw ConfigError(fmt::format("unknown diffusion kind '{}'", kind));
}

std::vector<double> make_grid(const DriftDiffusionSpec& spec, double r_max, std::size_t points,
                              double r_min) {
  if (points < 16) throw ConfigError("grid needs at least 16 points");
  if (!(r_min >= 0.0) || !(r_max > r_min) || !std::isfinite(r_max))
    throw ConfigError(fmt::format("bad grid bounds [{}, {}]", r_min, r_max));

  auto log_part = [](std::vector<double>& out, double lo, double hi, std::size_t n) {
    const double step = std::log(hi / lo) / static_cast<double>(n - 1);
    for (std::size_t k = 0; k < n; ++k) out.push_back(lo * std::exp(step * static_cast<double>(k)));
    out.back() = hi;
  };

  std::vector<double> grid;
  grid.reserve(points);
  double split = 0.0;
  if (spec.kind() == DiffusionKind::combined) {
    split = spec.crossover() / 100.0;
  } else if (spec.kind() == DiffusionKind::additive) {
    split = spec.temperature() / 100.0;
  }
  if (spec.kind() == DiffusionKind::multiplicative || r_min >= split) {
    if (!(r_min > 0.0)) throw ConfigError("a logarithmic grid needs r_min > 0");
    log_part(grid, r_min, r_max, points);
    return grid;
  }
  if (split >= r_max) throw ConfigError("r_max must exceed the linear section");
  const std::size_t n_lin = std::max<std::size_t>(4, points / 20);
  const double h = (split - r_min) / static_cast<double>(n_lin);
  for (std::size_t k = 0; k < n_lin; ++k) grid.push_back(r_min + h * static_cast<double>(k));
  log_part(grid, split, r_max, points - n_lin);
  return grid;
}

std::vector<double> make_uniform_grid(double r_max, std::size_t points) {
  if (points < 2 || !(r_max > 0.0)) throw ConfigError("uniform grid needs r_max > 0 and 2+ points");
  std::vector<double> grid(points);
  for (std::size_t k = 0; k < points; ++k)
    grid[k] = r_max * static_cast<double>(k) / static_cast<double>(points - 1);
  return grid;
}

GridDistribution stationary_solution(const DriftDiffusionSpec& spec, std::span<const double> grid) {
  check_increasing(grid);
  check_diffusion(spec, grid);
  const double r_lo = grid.front();
  const double r_max = grid.back();
  if (spec.kind() == DiffusionKind::multiplicative) {
    if (r_max < 50.0 * r_lo) throw ConfigError("grid must reach 50 r_min");
  } else {
    if (r_lo != 0.0) throw ConfigError("grid must start at r = 0");
    double scale = spec.temperature();
    if (spec.kind() == DiffusionKind::combined) scale = std::max(scale, spec.crossover());
    if (r_max < 50.0 * scale)
      throw ConfigError(fmt::format("grid stops at {} short of {}", r_max, 50.0 * scale));
  }

  const std::size_t n = grid.size();
  std::vector<double> phi(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) phi[i] = phi[i - 1] + drift_ratio_integral(spec, grid[i - 1], grid[i]);

  std::vector<double> log_u(n);
  for (std::size_t i = 0; i < n; ++i) log_u[i] = -std::log(spec.diffusion(grid[i])) - phi[i];
  const double ref = *std::max_element(log_u.begin(), log_u.end());

  double grid_mass = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double x0 = grid[i];
    grid_mass += Gauss8::integrate(
        [&](double x) {
          return std::exp(-std::log(spec.diffusion(x)) - phi[i] - drift_ratio_integral(spec, x0, x) - ref);
        },
        x0, grid[i + 1]);
  }

  // Tail beyond r_max: substitute t = (r_max/r)^k so that a power law with
  // exponent k + 1 becomes a constant integrand on (0, 1].
  const double b_max = spec.diffusion(r_max);
  double k = 0.0;
  if (spec.b() > 0.0) {
    k = spec.a() / spec.b();
  } else {
    k = r_max * (spec.drift(r_max) + 2.0 * spec.b() * r_max) / b_max - 1.0;
  }
  if (!(k > 0.0)) throw ConfigError("stationary density is not normalizable beyond the grid");
  const double log_u_max = log_u.back();
  auto tail_integrand = [&](double t) {
    const double r = r_max * std::pow(t, -1.0 / k);
    const double lp = log_u_max + std::log(b_max) - std::log(spec.diffusion(r)) -
                      drift_ratio_integral_log(spec, r_max, r) - ref;
    return std::exp(lp) * (r_max / k) * std::pow(t, -1.0 / k - 1.0);
  };
  double tail = 0.0;
  const std::array<double, 6> cuts{0.0, 1e-4, 1e-3, 1e-2, 1e-1, 1.0};
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) tail += Gauss16::integrate(tail_integrand, cuts[c], cuts[c + 1]);

  const double z = grid_mass + tail;
  if (!(z > 0.0) || !std::isfinite(z)) throw std::logic_error("stationary normalization failed");
  GridDistribution out;
  out.r.assign(grid.begin(), grid.end());
  out.density.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.density[i] = std::exp(log_u[i] - ref) / z;
  out.tail_mass = tail / z;
  return out;
}

double zero_flux_residual(const GridDistribution& dist, const DriftDiffusionSpec& spec) {
  const auto& r = dist.r;
  const auto& p = dist.density;
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < r.size(); ++i) {
    const double h1 = r[i] - r[i - 1];
    const double h2 = r[i + 1] - r[i];
    const double f0 = spec.diffusion(r[i - 1]) * p[i - 1];
    const double f1 = spec.diffusion(r[i]) * p[i];
    const double f2 = spec.diffusion(r[i + 1]) * p[i + 1];
    const double deriv = -h2 / (h1 * (h1 + h2)) * f0 + (h2 - h1) / (h1 * h2) * f1 +
                         h1 / (h2 * (h1 + h2)) * f2;
    worst = std::max(worst, std::abs(deriv + spec.drift(r[i]) * p[i]));
  }
  return worst;
}

std::vector<double> cell_widths(std::span<const double> grid) {
  const std::size_t n = grid.size();
  std::vector<double> w(n, 0.0);
  if (n < 2) return w;
  w[0] = 0.5 * (grid[1] - grid[0]);
  w[n - 1] = 0.5 * (grid[n - 1] - grid[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) w[i] = 0.5 * (grid[i + 1] - grid[i - 1]);
  return w;
}

double cell_mass(const GridDistribution& dist) {
  const auto w = cell_widths(dist.r);
  double m = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) m += w[i] * dist.density[i];
  return m;
}

double l1_distance(const GridDistribution& p, const GridDistribution& q) {
  if (p.r != q.r || p.density.size() != q.density.size())
    throw ConfigError("l1_distance needs matching grids");
  const auto w = cell_widths(p.r);
  double d = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) d += w[i] * std::abs(p.density[i] - q.density[i]);
  return d;
}

double max_stable_dt(std::span<const double> grid, const DriftDiffusionSpec& spec) {
  check_increasing(grid);
  double h_min = std::numeric_limits<double>::infinity();
  double b_max = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i > 0) h_min = std::min(h_min, grid[i] - grid[i - 1]);
    b_max = std::max(b_max, spec.diffusion(grid[i]));
  }
  return 0.4 * h_min * h_min / b_max;
}

GridDistribution evolve_transient(const GridDistribution& initial, const DriftDiffusionSpec& spec,
                                  double dt, std::size_t steps, const TransientObserver& observer,
                                  std::size_t observe_every) {
  const auto& r = initial.r;
  check_increasing(r);
  if (initial.density.size() != r.size()) throw ConfigError("density and grid sizes differ");
  check_diffusion(spec, r);
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  const double bound = max_stable_dt(r, spec);
  if (dt > bound)
    throw ConfigError(fmt::format("time step {} exceeds the stability bound {}", dt, bound));
  if (observe_every == 0) observe_every = 1;

  const std::size_t n = r.size();
  const auto w = cell_widths(r);
  // Interface coefficients: flux = c_up P_{i+1} - c_down P_i with
  // c_up = B_mid / (h g), c_down = B_mid g / h and g^2 the ratio of the
  // stationary density across the interface.
  std::vector<double> c_up(n - 1), c_down(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = r[i + 1] - r[i];
    const double b_mid = spec.diffusion(0.5 * (r[i] + r[i + 1]));
    const double log_ratio = std::log(spec.diffusion(r[i]) / spec.diffusion(r[i + 1])) -
                             drift_ratio_integral(spec, r[i], r[i + 1]);
    const double g = std::exp(0.5 * log_ratio);
    c_up[i] = b_mid / (h * g);
    c_down[i] = b_mid * g / h;
  }

  GridDistribution state{initial.r, initial.density, 0.0};
  std::vector<double> flux(n - 1);
  for (std::size_t step = 1; step <= steps; ++step) {
    auto& p = state.density;
    for (std::size_t i = 0; i + 1 < n; ++i) flux[i] = c_up[i] * p[i + 1] - c_down[i] * p[i];
    for (std::size_t i = 0; i < n; ++i) {
      const double right = i + 1 < n ? flux[i] : 0.0;
      const double left = i > 0 ? flux[i - 1] : 0.0;
      p[i] += dt * (right - left) / w[i];
    }
    if (observer && step % observe_every == 0) observer(step, state);
  }
  return state;
}

double delta_r2_diagnostic(double r, const DriftDiffusionSpec& spec) {
  if (!(r >= 0.0)) throw DomainError("income must be non-negative");
  return 2.0 * (spec.B0() - r * spec.A0() + (spec.b() - spec.a()) * r * r);
}

double alpha_from_coefficients(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw DomainError(fmt::format("alpha needs a > 0 and b > 0, got a = {}, b = {}", a, b));
  return 1.0 + a / b;
}

void write_distribution_csv(std::ostream& out, const GridDistribution& dist) {
  out << "r,density\n";
  for (std::size_t i = 0; i < dist.r.size(); ++i)
    out << csv::format_number(dist.r[i]) << ',' << csv::format_number(dist.density[i]) << '\n';
}

}  // namespace ineq::fp
