#include "ineq/two_class.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <fmt/format.h>

#include "ineq/csv.hpp"
#include "ineq/error.hpp"
#include "json.hpp"

namespace ineq {
namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kRelTol = 1e-13;

// Integrates over theta in [theta_lo, theta_hi]. `integrand(phi)` is written
// in phi = pi/2 - theta so that the cos-power endpoint at theta = pi/2 sits at
// an exactly representable phi = 0, where tanh-sinh handles it. The
// exponential factor exp(-k theta) varies on the scale 1/k near theta = 0, so
// the range is split at theta = 4^j / k to keep every panel resolved.
template <class F>
double integrate_angle(double theta_lo, double theta_hi, double k, F integrand) {
  if (!(theta_hi > theta_lo)) return 0.0;
  static boost::math::quadrature::tanh_sinh<double> rule;
  std::vector<double> cuts{theta_lo};
  for (double b = 1.0 / k; b < theta_hi; b *= 4.0) {
    if (b > theta_lo) cuts.push_back(b);
  }
  cuts.push_back(theta_hi);

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double phi_lo = std::max(kHalfPi - cuts[i + 1], 0.0);
    const double phi_hi = kHalfPi - cuts[i];
    if (!(phi_hi > phi_lo)) continue;
    total += rule.integrate(integrand, phi_lo, phi_hi, kRelTol);
  }
  return total;
}

}  // namespace

TwoClassModel::TwoClassModel(double temperature, double alpha, double crossover)
    : temperature_(temperature), alpha_(alpha), crossover_(crossover) {
  if (!(std::isfinite(temperature) && temperature > 0.0))
    throw DomainError(fmt::format("temperature must be positive, got {}", temperature));
  if (!(std::isfinite(alpha) && alpha > 1.0))
    throw DomainError(fmt::format("Pareto exponent must exceed 1, got {}", alpha));
  if (!(std::isfinite(crossover) && crossover > 0.0))
    throw DomainError(fmt::format("crossover income must be positive, got {}", crossover));
  norm_ = 1.0 / (crossover_ * angle_mass(0.0, kHalfPi));
}

// integral exp(-k theta) cos^(alpha-1) theta d theta
double TwoClassModel::angle_mass(double theta_lo, double theta_hi) const {
  const double k = crossover_ / temperature_;
  const double e = alpha_ - 1.0;
  return integrate_angle(theta_lo, theta_hi, k, [k, e](double phi) {
    return std::exp(-k * (kHalfPi - phi)) * std::pow(std::sin(phi), e);
  });
}

// integral exp(-k theta) sin theta cos^(alpha-2) theta d theta
double TwoClassModel::angle_moment(double theta_lo, double theta_hi) const {
  const double k = crossover_ / temperature_;
  const double e = alpha_ - 2.0;
  return integrate_angle(theta_lo, theta_hi, k, [k, e](double phi) {
    return std::exp(-k * (kHalfPi - phi)) * std::cos(phi) * std::pow(std::sin(phi), e);
  });
}

double TwoClassModel::pdf(double r) const {
  if (!(r >= 0.0)) throw DomainError(fmt::format("income must be non-negative, got {}", r));
  const double u = r / crossover_;
  const double k = crossover_ / temperature_;
  return norm_ * std::exp(-k * std::atan(u)) / std::pow(1.0 + u * u, 0.5 * (alpha_ + 1.0));
}

double TwoClassModel::ccdf(double r) const {
  if (!(r >= 0.0)) throw DomainError(fmt::format("income must be non-negative, got {}", r));
  if (r == 0.0) return 1.0;
  if (std::isinf(r)) return 0.0;
  const double theta = std::atan(r / crossover_);
  return std::min(1.0, norm_ * crossover_ * angle_mass(theta, kHalfPi));
}

double TwoClassModel::upper_moment(double r) const {
  if (!(r >= 0.0)) throw DomainError(fmt::format("income must be non-negative, got {}", r));
  if (std::isinf(r)) return 0.0;
  const double theta = std::atan(r / crossover_);
  return norm_ * crossover_ * crossover_ * angle_moment(theta, kHalfPi);
}

std::string to_json(const TwoClassModel& model) {
  nlohmann::ordered_json j;
  j["T"] = model.temperature();
  j["alpha"] = model.alpha();
  j["r0"] = model.crossover();
  j["c"] = model.normalization();
  return j.dump(2);
}

TwoClassModel model_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    return TwoClassModel(j.at("T").get<double>(), j.at("alpha").get<double>(),
                         j.at("r0").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("model json", 0, e.what());
  }
}

void write_ccdf_csv(std::ostream& out, const TwoClassModel& model, std::span<const double> incomes) {
  out << "r,C\n";
  for (double r : incomes) out << csv::format_number(r) << ',' << csv::format_number(model.ccdf(r)) << '\n';
}

double tail_fraction(double temperature, double mean_income) {
  if (!(temperature > 0.0)) throw DomainError("temperature must be positive");
  if (!(mean_income > 0.0)) throw DomainError("mean income must be positive");
  if (temperature > mean_income) {
    throw NonPhysicalFitError(fmt::format(
        "temperature {} exceeds mean income {}: negative tail fraction", temperature, mean_income));
  }
  return 1.0 - temperature / mean_income;
}

double gini_two_class(double f) {
  if (!(f >= 0.0 && f < 1.0)) throw DomainError(fmt::format("tail fraction {} not in [0, 1)", f));
  return 0.5 * (1.0 + f);
}

ClassBoundary class_boundary(double temperature, double alpha, double exp_prefactor,
                             double pl_prefactor) {
  if (!(temperature > 0.0) || !(alpha > 0.0) || !(exp_prefactor > 0.0) || !(pl_prefactor > 0.0))
    throw DomainError("class boundary needs positive T, alpha and prefactors");

  // gap(r) = ln(exponential fit) - ln(power-law fit). It is concave with its
  // maximum at alpha T, so the crossing where the tail takes over for good is
  // the root above that point.
  const double offset = std::log(exp_prefactor) - std::log(pl_prefactor);
  auto gap = [&](double r) { return offset - r / temperature + alpha * std::log(r); };

  double lo = std::max(1.0, alpha) * temperature;
  double hi = 100.0 * temperature;
  double g_lo = gap(lo);
  const double g_hi = gap(hi);
  if (g_lo == 0.0) return {lo, std::exp(-lo / temperature)};
  if (g_hi == 0.0) return {hi, std::exp(-hi / temperature)};
  if ((g_lo > 0.0) == (g_hi > 0.0)) {
    throw NoIntersectionError(fmt::format(
        "exponential and power-law fits do not cross on [{}, {}]", lo, hi));
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g_mid = gap(mid);
    if ((g_mid > 0.0) == (g_lo > 0.0)) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
    }
  }
  const double r_star = 0.5 * (lo + hi);
  return {r_star, std::exp(-r_star / temperature)};
}

}  // namespace ineq
