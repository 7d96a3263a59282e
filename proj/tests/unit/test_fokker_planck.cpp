#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "../support/oracles.hpp"
#include "ineq/error.hpp"
#include "ineq/fokker_planck.hpp"
#include "ineq/two_class.hpp"

using namespace ineq::fp;

namespace {

// Least-squares slope of ln P against ln r over nodes with r in [lo, hi].
double log_log_slope(const GridDistribution& d, double lo, double hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < d.r.size(); ++i) {
    if (d.r[i] < lo || d.r[i] > hi) continue;
    const double x = std::log(d.r[i]);
    const double y = std::log(d.density[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

GridDistribution pulse(const std::vector<double>& grid, double at) {
  GridDistribution d;
  d.r = grid;
  d.density.assign(grid.size(), 0.0);
  const auto it = std::lower_bound(grid.begin(), grid.end(), at);
  const auto i = static_cast<std::size_t>(it - grid.begin());
  const auto w = cell_widths(grid);
  d.density[i] = 1.0 / w[i];
  return d;
}

}  // namespace

TEST(DriftDiffusionSpec, DerivedParameters) {
  const auto s = DriftDiffusionSpec::combined(2.0, 96.0, 0.5, 1.0);
  EXPECT_DOUBLE_EQ(s.temperature(), 48.0);
  EXPECT_DOUBLE_EQ(s.crossover(), std::sqrt(96.0));
  EXPECT_DOUBLE_EQ(s.pareto_exponent(), 1.5);
  EXPECT_DOUBLE_EQ(s.drift(2.0), 3.0);
  EXPECT_DOUBLE_EQ(s.diffusion(2.0), 100.0);
  const auto m = DriftDiffusionSpec::multiplicative(1.0, 1.0);
  EXPECT_THROW(m.temperature(), ineq::DomainError);
  EXPECT_THROW(m.crossover(), ineq::DomainError);
  EXPECT_DOUBLE_EQ(m.pareto_exponent(), 2.0);
  EXPECT_THROW(DriftDiffusionSpec::additive(1.0, 1.0).pareto_exponent(), ineq::DomainError);
  EXPECT_THROW(DriftDiffusionSpec::additive(0.0, 1.0), ineq::DomainError);
  EXPECT_THROW(DriftDiffusionSpec::multiplicative(1.0, -1.0), ineq::DomainError);
  EXPECT_THROW(DriftDiffusionSpec::combined(1.0, 1.0, 0.0, 1.0), ineq::DomainError);
}

TEST(DriftDiffusionSpec, JsonRoundTrip) {
  const auto s = DriftDiffusionSpec::combined(1.0, 48.0, 0.001, 0.003);
  const auto t = spec_from_json(to_json(s));
  EXPECT_EQ(t.kind(), DiffusionKind::combined);
  EXPECT_EQ(t.A0(), s.A0());
  EXPECT_EQ(t.b(), s.b());
  EXPECT_EQ(spec_from_json(R"({"kind": "additive", "A0": 1, "B0": 5})").temperature(), 5.0);
  EXPECT_THROW(spec_from_json(R"({"kind": "cubic"})"), ineq::ConfigError);
  EXPECT_THROW(spec_from_json("not json"), ineq::ConfigError);
  EXPECT_THROW(spec_from_json(R"({"kind": "additive", "A0": 1})"), ineq::ConfigError);
}

TEST(StationarySolution, AdditiveIsExponential) {
  const auto s = DriftDiffusionSpec::additive(2.0, 10.0);  // T = 5
  const auto g = make_grid(s, 60.0 * 5.0, 2000);
  const auto d = stationary_solution(s, g);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] > 50.0) break;
    worst = std::max(worst, std::abs(d.density[i] / (std::exp(-g[i] / 5.0) / 5.0) - 1.0));
  }
  EXPECT_LT(worst, 1e-4);
  EXPECT_NEAR(cell_mass(d) + d.tail_mass, 1.0, 1e-5);
}

TEST(StationarySolution, CombinedMatchesClosedForm) {
  const double T = 48.0, r0 = 113.0, alpha = 1.34;
  const double b = T / (r0 * r0);
  const auto s = DriftDiffusionSpec::combined(1.0, T, (alpha - 1.0) * b, b);
  const auto g = make_grid(s, 50.0 * r0, 4000);
  const auto d = stationary_solution(s, g);
  const ineq::TwoClassModel m(s.temperature(), s.pareto_exponent(), s.crossover());
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < g.size(); ++i)
    worst = std::max(worst, std::abs(d.density[i] / m.pdf(g[i]) - 1.0));
  EXPECT_LT(worst, 1e-4);
  // independent shape oracle, normalized by its own quadrature
  const double c = 1.0 / oracle::two_class_mass(0.0, T, alpha, r0);
  for (double r : {10.0, 100.0, 1000.0}) {
    const auto i = static_cast<std::size_t>(std::lower_bound(g.begin(), g.end(), r) - g.begin());
    EXPECT_NEAR(d.density[i] / (c * oracle::two_class_shape(g[i], T, alpha, r0)), 1.0, 1e-4);
  }
}

TEST(StationarySolution, MultiplicativeIsPowerLaw) {
  for (double ratio : {0.5, 1.0, 2.0}) {
    const auto s = DriftDiffusionSpec::multiplicative(ratio * 0.01, 0.01);
    const auto g = make_grid(s, 1e4, 2000, 1.0);
    const auto d = stationary_solution(s, g);
    const double alpha = alpha_from_coefficients(ratio * 0.01, 0.01);
    EXPECT_NEAR(log_log_slope(d, 2.0, 5e3), -(1.0 + alpha), 1e-3) << ratio;
    // round trip through the fitted tail exponent
    EXPECT_NEAR(-log_log_slope(d, 10.0, 1e3) - 1.0, 1.0 + ratio, 1e-2);
  }
}

TEST(StationarySolution, ZeroFluxResidualIsSmall) {
  const double b = 48.0 / (113.0 * 113.0);
  for (const auto& s : {DriftDiffusionSpec::additive(1.0, 40.0),
                        DriftDiffusionSpec::combined(1.0, 48.0, 0.34 * b, b)}) {
    const double scale = s.kind() == DiffusionKind::combined ? s.crossover() : s.temperature();
    const auto d = stationary_solution(s, make_grid(s, 60.0 * scale, 3000));
    EXPECT_LT(zero_flux_residual(d, s), 1e-4);
  }
}

TEST(StationarySolution, RejectsBadGrids) {
  const auto s = DriftDiffusionSpec::additive(1.0, 10.0);
  EXPECT_THROW(stationary_solution(s, std::vector<double>{0.0, 2.0, 1.0, 600.0}),
               ineq::ConfigError);
  EXPECT_THROW(stationary_solution(s, make_uniform_grid(100.0, 100)), ineq::ConfigError);
  std::vector<double> shifted = make_uniform_grid(600.0, 100);
  for (auto& r : shifted) r += 1.0;
  EXPECT_THROW(stationary_solution(s, shifted), ineq::ConfigError);
  EXPECT_THROW(make_grid(s, 600.0, 8), ineq::ConfigError);
  const auto m = DriftDiffusionSpec::multiplicative(1.0, 1.0);
  EXPECT_THROW(make_grid(m, 100.0, 100, 0.0), ineq::ConfigError);
  // B(0) = 0 for the multiplicative kind
  EXPECT_THROW(stationary_solution(m, make_uniform_grid(100.0, 100)),
               ineq::SingularDiffusionError);
}

TEST(Grid, ShapeAndSpacing) {
  const auto s = DriftDiffusionSpec::additive(1.0, 10.0);
  const auto g = make_grid(s, 600.0, 400);
  EXPECT_EQ(g.size(), 400u);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_DOUBLE_EQ(g.back(), 600.0);
  EXPECT_TRUE(std::is_sorted(g.begin(), g.end()));
  EXPECT_EQ(std::adjacent_find(g.begin(), g.end()), g.end());
  const auto w = cell_widths(g);
  double sum = 0.0;
  for (double x : w) sum += x;
  EXPECT_NEAR(sum, 600.0, 1e-9);
  const auto u = make_uniform_grid(10.0, 11);
  EXPECT_DOUBLE_EQ(u[3], 3.0);
}

TEST(Transient, StationaryStateIsAFixedPoint) {
  const auto s = DriftDiffusionSpec::additive(1.0, 10.0);
  const auto g = make_uniform_grid(500.0, 201);
  const auto p0 = stationary_solution(s, g);
  const double dt = max_stable_dt(g, s);
  std::size_t calls = 0;
  double worst_mass = 0.0;
  const double m0 = cell_mass(p0);
  const auto p = evolve_transient(
      p0, s, dt, 1000,
      [&](std::size_t, const GridDistribution& st) {
        ++calls;
        worst_mass = std::max(worst_mass, std::abs(cell_mass(st) - m0));
      });
  EXPECT_EQ(calls, 1000u);
  EXPECT_LT(l1_distance(p, p0), 1e-6);
  EXPECT_LT(worst_mass, 1e-8);
}

TEST(Transient, PulseRelaxesToExponential) {
  // T = 10 on [0, 500], pulse at 5T. The slowest mode decays at rate
  // A0^2 / (4 B0) = 1/40, so t = 2000 is 50 e-folds.
  const auto s = DriftDiffusionSpec::additive(1.0, 10.0);
  const auto g = make_uniform_grid(500.0, 201);
  auto stat = stationary_solution(s, g);
  const double norm = cell_mass(stat);
  for (auto& x : stat.density) x /= norm;

  const double dt = max_stable_dt(g, s);
  const auto p0 = pulse(g, 50.0);
  std::vector<double> l1;
  double worst_mass = 0.0;
  const auto p = evolve_transient(
      p0, s, dt, 8000,
      [&](std::size_t, const GridDistribution& st) {
        l1.push_back(l1_distance(st, stat));
        worst_mass = std::max(worst_mass, std::abs(cell_mass(st) - 1.0));
      },
      200);
  EXPECT_LT(l1_distance(p, stat), 1e-3);
  EXPECT_LT(worst_mass, 1e-8);
  for (std::size_t k = 5; k < l1.size(); ++k) EXPECT_LE(l1[k], l1[k - 1] + 1e-12) << k;

  // step-halving check: same physical time with dt/2 lands on the same state
  const auto q = evolve_transient(p0, s, dt / 2.0, 16000);
  EXPECT_LT(l1_distance(p, q), 1e-4);
}

TEST(Transient, StabilityBoundEnforced) {
  const auto s = DriftDiffusionSpec::additive(1.0, 10.0);
  const auto g = make_uniform_grid(500.0, 201);
  const auto p0 = stationary_solution(s, g);
  EXPECT_DOUBLE_EQ(max_stable_dt(g, s), 0.4 * 2.5 * 2.5 / 10.0);
  EXPECT_THROW(evolve_transient(p0, s, 1.01 * max_stable_dt(g, s), 1), ineq::ConfigError);
}

TEST(DeltaR2, AdditiveChangesSignAtTemperature) {
  const auto s = DriftDiffusionSpec::additive(2.0, 10.0);
  EXPECT_DOUBLE_EQ(delta_r2_diagnostic(5.0, s), 0.0);
  EXPECT_GT(delta_r2_diagnostic(4.999, s), 0.0);
  EXPECT_LT(delta_r2_diagnostic(5.001, s), 0.0);
  EXPECT_DOUBLE_EQ(delta_r2_diagnostic(0.0, s), 20.0);
  EXPECT_THROW(delta_r2_diagnostic(-1.0, s), ineq::DomainError);
}

TEST(DeltaR2, MultiplicativeCases) {
  const auto balanced = DriftDiffusionSpec::multiplicative(0.3, 0.3);
  for (double r : {0.0, 1.0, 17.5, 1e6}) EXPECT_EQ(delta_r2_diagnostic(r, balanced), 0.0);
  const auto loose = DriftDiffusionSpec::multiplicative(0.1, 0.3);
  for (double r : {1.0, 17.5, 1e6})
    EXPECT_NEAR(delta_r2_diagnostic(r, loose), 2.0 * 0.2 * r * r, 1e-12 * r * r);
}

TEST(AlphaFromCoefficients, Values) {
  EXPECT_DOUBLE_EQ(alpha_from_coefficients(0.7, 0.7), 2.0);
  EXPECT_DOUBLE_EQ(alpha_from_coefficients(0.5, 1.0), 1.5);
  EXPECT_THROW(alpha_from_coefficients(1.0, 0.0), ineq::DomainError);
  EXPECT_THROW(alpha_from_coefficients(-1.0, 1.0), ineq::DomainError);
}

TEST(DistributionCsv, Header) {
  GridDistribution d{{0.0, 1.0}, {0.5, 0.25}, 0.0};
  std::ostringstream out;
  write_distribution_csv(out, d);
  EXPECT_EQ(out.str(), "r,density\n0,0.5\n1,0.25\n");
}
