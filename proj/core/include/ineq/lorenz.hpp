#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace ineq {

struct LorenzPoint {
  double x;  // population fraction
  double y;  // resource fraction
};

// Points run from (0,0) to (1,1) with x and y non-decreasing. A vertical
// segment at x = 1 represents a jump (income concentrated in a vanishing
// fraction of the population).
struct LorenzCurve {
  std::vector<LorenzPoint> points;
  double gini = 0.0;
};

// y = x + (1-x) ln(1-x), the Lorenz curve of any exponential distribution.
// Defined on [0, 1] with y(1) = 1. Throws DomainError outside.
double lorenz_exponential(double x);

// y = (1-f)[x + (1-x) ln(1-x)] + f * step(x - 1), where the step is 1 only at
// x = 1 exactly. Throws DomainError unless 0 <= x <= 1 and 0 <= f < 1.
double lorenz_two_class(double x, double f);

// 1 - 2 * integral y dx by the trapezoid rule over the points. Throws
// MalformedCurveError when the points violate the curve invariants or there
// are fewer than two.
double gini_from_curve(std::span<const LorenzPoint> points);

// Validates the points and attaches the Gini coefficient.
LorenzCurve make_lorenz_curve(std::vector<LorenzPoint> points);

// n uniform steps in x on [0, 1].
LorenzCurve sample_lorenz_exponential(std::size_t n);

// n uniform steps on [0, 1) followed by the pre-jump point (1, 1-f) and (1, 1).
LorenzCurve sample_lorenz_two_class(std::size_t n, double f);

// CSV with header `x,y`.
void write_lorenz_csv(std::ostream& out, const LorenzCurve& curve);

}  // namespace ineq
