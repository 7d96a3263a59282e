#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace ineq::opt {

struct Minimum1D {
  double x;
  double value;
  std::size_t evaluations;
};

// Golden-section search for a minimum of a unimodal function on [lo, hi],
// stopping when the bracket is narrower than tol * (|x| + tol).
Minimum1D golden_section(const std::function<double(double)>& f, double lo, double hi,
                         double tol = 1e-10, std::size_t max_iter = 200);

struct MinimumND {
  std::vector<double> x;
  double value;
  std::size_t evaluations;
  bool converged;
};

// Nelder-Mead simplex (standard reflection/expansion/contraction/shrink
// coefficients 1, 2, 1/2, 1/2). The initial simplex offsets each coordinate
// of `start` by `step`. Stops when the spread of simplex values drops below
// f_tol or after max_evals evaluations.
MinimumND nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                      std::vector<double> start, double step, double f_tol = 1e-12,
                      std::size_t max_evals = 4000);

// Ordinary least-squares line y = intercept + slope x.
struct LineFit {
  double slope;
  double intercept;
  double mean_square_residual;
};

// Throws InsufficientDataError for fewer than two points or zero x-spread.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace ineq::opt
