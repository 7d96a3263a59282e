#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ineq::fp {

enum class DiffusionKind { additive, multiplicative, combined };

// Drift A(r) = A0 + a r and diffusion B(r) = B0 + b r^2 of the income
// Fokker-Planck equation
//   dP/dt = d/dr [A P] + d^2/dr^2 [B P].
// Additive uses only (A0, B0), multiplicative only (a, b), combined all four.
class DriftDiffusionSpec {
 public:
  static DriftDiffusionSpec additive(double A0, double B0);
  static DriftDiffusionSpec multiplicative(double a, double b);
  static DriftDiffusionSpec combined(double A0, double B0, double a, double b);

  DiffusionKind kind() const noexcept { return kind_; }
  double A0() const noexcept { return A0_; }
  double B0() const noexcept { return B0_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }

  double drift(double r) const { return A0_ + a_ * r; }
  double diffusion(double r) const { return B0_ + b_ * r * r; }

  // T = B0/A0; throws DomainError for the multiplicative kind.
  double temperature() const;
  // r0 = sqrt(B0/b); combined only.
  double crossover() const;
  // alpha = 1 + a/b; multiplicative and combined.
  double pareto_exponent() const;

 private:
  DriftDiffusionSpec(DiffusionKind kind, double A0, double B0, double a, double b);

  DiffusionKind kind_;
  double A0_;
  double B0_;
  double a_;
  double b_;
};

std::string to_json(const DriftDiffusionSpec& spec);
// Keys: kind ("additive" | "multiplicative" | "combined"), A0, B0, a, b.
DriftDiffusionSpec spec_from_json(const std::string& text);

// Density samples on a strictly increasing grid. tail_mass is the analytic
// mass beyond the last grid point that was included in the normalization.
struct GridDistribution {
  std::vector<double> r;
  std::vector<double> density;
  double tail_mass = 0.0;
};

// Grid for the stationary problem: linear on [r_min, s/100] and logarithmic
// on [s/100, r_max], s = r0 for combined specs and T for additive ones. For
// multiplicative specs the grid is logarithmic on [r_min, r_max] and r_min
// must be positive. Throws ConfigError on bad bounds or points < 16.
std::vector<double> make_grid(const DriftDiffusionSpec& spec, double r_max, std::size_t points,
                              double r_min = 0.0);

// Uniform grid on [0, r_max], used for transient evolution.
std::vector<double> make_uniform_grid(double r_max, std::size_t points);

// P_s(r) = c / B(r) * exp(-integral^r A/B dr') on the grid, with the
// cumulative integral and the normalization taken by Gauss-Legendre panels
// between grid nodes. Mass beyond the grid is added from the local power-law
// asymptote so that grid mass + tail_mass = 1.
//
// Throws SingularDiffusionError if B vanishes on the grid and ConfigError if
// the grid is not strictly increasing, does not start at 0 (additive and
// combined), or stops short of 50 max(T, r0).
GridDistribution stationary_solution(const DriftDiffusionSpec& spec, std::span<const double> grid);

// Max over interior nodes of |d(B P)/dr + A P| by second-order central
// differences: the zero-flux condition of the stationary state.
double zero_flux_residual(const GridDistribution& dist, const DriftDiffusionSpec& spec);

// Control-volume widths of the nodes (half-cells at both ends).
std::vector<double> cell_widths(std::span<const double> grid);

// sum_i w_i P_i with control-volume widths.
double cell_mass(const GridDistribution& dist);

// sum_i w_i |P_i - Q_i|; the grids must match.
double l1_distance(const GridDistribution& p, const GridDistribution& q);

using TransientObserver = std::function<void(std::size_t step, const GridDistribution& state)>;

// Explicit conservative finite-volume integration with zero flux through both
// ends of the grid. The interface flux J = A P + d(B P)/dr is written as
// B P_s d(P/P_s)/dr and discretized between nodes i and i+1 as
//   J = B(mid) / h * (P_{i+1} / g - P_i g),  g = sqrt(P_s(r_{i+1}) / P_s(r_i)),
// with the ratio g taken from the quadrature of A/B. The sampled stationary
// density is then an exact fixed point and cell mass sum w_i P_i is
// preserved to rounding.
//
// Throws ConfigError if dt > 0.4 min(h)^2 / max B and SingularDiffusionError
// if B vanishes on the grid. The observer, when set, is called after every
// `observe_every` steps.
GridDistribution evolve_transient(const GridDistribution& initial, const DriftDiffusionSpec& spec,
                                  double dt, std::size_t steps,
                                  const TransientObserver& observer = {},
                                  std::size_t observe_every = 1);

// Largest stable time step for a grid: 0.4 min(h)^2 / max B.
double max_stable_dt(std::span<const double> grid, const DriftDiffusionSpec& spec);

// Rate of change of <r^2> per unit time at income r: 2(-r A(r) + B(r)),
// evaluated as 2(B0 - r A0 + (b - a) r^2) so that a == b cancels exactly.
double delta_r2_diagnostic(double r, const DriftDiffusionSpec& spec);

// alpha = 1 + a/b. Throws DomainError unless a > 0 and b > 0.
double alpha_from_coefficients(double a, double b);

// CSV with header `r,density`.
void write_distribution_csv(std::ostream& out, const GridDistribution& dist);

}  // namespace ineq::fp
