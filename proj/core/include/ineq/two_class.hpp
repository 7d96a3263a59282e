#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace ineq {

// Stationary income density of the combined additive + multiplicative
// diffusion process:
//
//   P(r) = c * exp(-(r0/T) * atan(r/r0)) / [1 + (r/r0)^2]^((alpha+1)/2)
//
// Exponential with temperature T well below the crossover income r0, power law
// P ~ r^-(1+alpha) well above it. The normalization c has no closed form and is
// computed numerically on construction.
//
// All integrals are taken in the angle variable theta = atan(r/r0), where the
// density becomes exp(-k theta) cos^(alpha-1)(theta) on [0, pi/2) with
// k = r0/T, by tanh-sinh quadrature in pi/2 - theta.
class TwoClassModel {
 public:
  // Throws DomainError unless T > 0, alpha > 1, r0 > 0 (all finite).
  TwoClassModel(double temperature, double alpha, double crossover);

  double temperature() const noexcept { return temperature_; }
  double alpha() const noexcept { return alpha_; }
  double crossover() const noexcept { return crossover_; }
  double normalization() const noexcept { return norm_; }

  // Probability density at r >= 0. Throws DomainError for r < 0.
  double pdf(double r) const;

  // Complementary CDF C(r) = integral_r^inf pdf. C(0) = 1.
  double ccdf(double r) const;

  // integral_r^inf r' pdf(r') dr'.
  double upper_moment(double r) const;

  double mean() const { return upper_moment(0.0); }

 private:
  double angle_mass(double theta_lo, double theta_hi) const;
  double angle_moment(double theta_lo, double theta_hi) const;

  double temperature_;
  double alpha_;
  double crossover_;
  double norm_ = 0.0;
};

// Flat JSON object {"T":..,"alpha":..,"r0":..,"c":..}.
std::string to_json(const TwoClassModel& model);
// Reads T, alpha and r0; c is recomputed.
TwoClassModel model_from_json(const std::string& text);

// CSV with header `r,C`, one row per income.
void write_ccdf_csv(std::ostream& out, const TwoClassModel& model, std::span<const double> incomes);

// f = 1 - T/<r>: the share of total income held above the exponential class.
// Throws DomainError for T <= 0 or mean <= 0, NonPhysicalFitError if T > mean.
double tail_fraction(double temperature, double mean_income);

// Gini coefficient of an exponential body with a fraction f of income in a
// vanishing-population tail: (1 + f)/2. Throws DomainError unless 0 <= f < 1.
double gini_two_class(double f);

struct ClassBoundary {
  double income;          // r*
  double upper_fraction;  // exp(-r*/T)
};

// Intersection of an exponential CCDF fit exp_prefactor * exp(-r/T) with a
// power-law fit pl_prefactor * r^-alpha: the upper crossing, located by
// bisection on [max(1, alpha) T, 100 T]. A lower crossing below the log-gap
// maximum at alpha T is ignored.
// Throws NoIntersectionError when the two curves do not cross in the bracket,
// DomainError for non-positive inputs.
ClassBoundary class_boundary(double temperature, double alpha, double exp_prefactor,
                             double pl_prefactor);

}  // namespace ineq
