#pragma once

// Small multivariate solvers shared by the fitting modules. Internal header.

#include <functional>
#include <span>
#include <vector>

namespace dpprior::detail {

using VectorFunction = std::function<std::vector<double>(std::span<const double>)>;
using ScalarFunction = std::function<double(std::span<const double>)>;

struct NewtonResult {
  std::vector<double> x;
  std::vector<double> residual;
  int iterations = 0;
  bool converged = false;
};

/// Damped Newton on F(x) = 0 with a central-difference Jacobian. Steps are
/// halved until max|F| decreases. Evaluations that throw count as failed
/// trial points. Stops when max|F| < tol.
NewtonResult damped_newton(const VectorFunction& f, std::vector<double> x0, double tol,
                           int max_iter = 100, double fd_step = 1e-5);

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Nelder–Mead (GSL nmsimplex2), converged once the simplex size falls below
/// size_tol. Non-finite or throwing evaluations are treated as +inf.
SimplexResult nelder_mead(const ScalarFunction& f, const std::vector<double>& x0,
                          const std::vector<double>& step, double size_tol, int max_iter = 2000);

double max_abs(std::span<const double> v);

}  // namespace dpprior::detail
