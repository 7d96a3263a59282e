#include "ineq/lorenz.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "ineq/csv.hpp"
#include "ineq/error.hpp"

namespace ineq {

double lorenz_exponential(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError(fmt::format("x = {} outside [0, 1]", x));
  if (x == 1.0) return 1.0;
  return x + (1.0 - x) * std::log1p(-x);
}

double lorenz_two_class(double x, double f) {
  if (!(f >= 0.0 && f < 1.0)) throw DomainError(fmt::format("f = {} outside [0, 1)", f));
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError(fmt::format("x = {} outside [0, 1]", x));
  if (x == 1.0) return 1.0;
  return (1.0 - f) * lorenz_exponential(x);
}

double gini_from_curve(std::span<const LorenzPoint> points) {
  if (points.size() < 2) throw MalformedCurveError("Lorenz curve needs at least two points");
  constexpr double eps = 1e-12;
  const auto& first = points.front();
  const auto& last = points.back();
  if (std::abs(first.x) > eps || std::abs(first.y) > eps)
    throw MalformedCurveError("Lorenz curve must start at (0, 0)");
  if (std::abs(last.x - 1.0) > eps || std::abs(last.y - 1.0) > eps)
    throw MalformedCurveError("Lorenz curve must end at (1, 1)");

  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const auto& p = points[i - 1];
    const auto& q = points[i];
    if (!std::isfinite(q.x) || !std::isfinite(q.y))
      throw MalformedCurveError("non-finite Lorenz point");
    if (q.x < p.x - eps || q.y < p.y - eps)
      throw MalformedCurveError(fmt::format("Lorenz curve not monotone at point {}", i));
    area += 0.5 * (q.x - p.x) * (q.y + p.y);
  }
  const double g = 1.0 - 2.0 * area;
  return std::clamp(g, 0.0, 1.0);
}

LorenzCurve make_lorenz_curve(std::vector<LorenzPoint> points) {
  LorenzCurve curve{std::move(points), 0.0};
  curve.gini = gini_from_curve(curve.points);
  return curve;
}

LorenzCurve sample_lorenz_exponential(std::size_t n) {
  if (n < 1) throw DomainError("need at least one step");
  std::vector<LorenzPoint> pts;
  pts.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(n);
    pts.push_back({x, lorenz_exponential(x)});
  }
  return make_lorenz_curve(std::move(pts));
}

LorenzCurve sample_lorenz_two_class(std::size_t n, double f) {
  if (n < 1) throw DomainError("need at least one step");
  std::vector<LorenzPoint> pts;
  pts.reserve(n + 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(n);
    pts.push_back({x, lorenz_two_class(x, f)});
  }
  pts.push_back({1.0, 1.0 - f});
  pts.push_back({1.0, 1.0});
  return make_lorenz_curve(std::move(pts));
}

void write_lorenz_csv(std::ostream& out, const LorenzCurve& curve) {
  out << "x,y\n";
  for (const auto& p : curve.points)
    out << csv::format_number(p.x) << ',' << csv::format_number(p.y) << '\n';
}

}  // namespace ineq
