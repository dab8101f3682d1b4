#include "solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_linalg.h>
#include <gsl/gsl_multimin.h>

#include "dpprior/errors.hpp"

namespace dpprior::detail {

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

namespace {

bool try_eval(const VectorFunction& f, std::span<const double> x, std::vector<double>& out) {
  try {
    out = f(x);
  } catch (const std::exception&) {
    return false;
  }
  return std::all_of(out.begin(), out.end(), [](double v) { return std::isfinite(v); });
}

// Solves J δ = -r in place; false if J is singular.
bool solve_linear(std::vector<double> jac, std::vector<double> r, std::size_t d,
                  std::vector<double>& delta) {
  gsl_matrix_view m = gsl_matrix_view_array(jac.data(), d, d);
  gsl_vector_view b = gsl_vector_view_array(r.data(), d);
  std::unique_ptr<gsl_permutation, decltype(&gsl_permutation_free)> perm(gsl_permutation_alloc(d),
                                                                         gsl_permutation_free);
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(d), gsl_vector_free);
  int sign = 0;
  gsl_linalg_LU_decomp(&m.matrix, perm.get(), &sign);
  if (gsl_linalg_LU_det(&m.matrix, sign) == 0.0) return false;
  if (gsl_linalg_LU_solve(&m.matrix, perm.get(), &b.vector, x.get()) != GSL_SUCCESS) return false;
  delta.resize(d);
  for (std::size_t i = 0; i < d; ++i) delta[i] = -gsl_vector_get(x.get(), i);
  return std::all_of(delta.begin(), delta.end(), [](double v) { return std::isfinite(v); });
}

struct GslErrorsOff {
  gsl_error_handler_t* previous;
  GslErrorsOff() : previous(gsl_set_error_handler_off()) {}
  ~GslErrorsOff() { gsl_set_error_handler(previous); }
};

}  // namespace

NewtonResult damped_newton(const VectorFunction& f, std::vector<double> x0, double tol,
                           int max_iter, double fd_step) {
  GslErrorsOff guard;
  NewtonResult result;
  result.x = std::move(x0);
  const std::size_t d = result.x.size();
  if (!try_eval(f, result.x, result.residual) || result.residual.size() != d) {
    throw ConvergenceError("damped_newton: cannot evaluate at the starting point", result.x);
  }
  std::vector<double> jac(d * d), probe, plus, minus, delta;
  for (; result.iterations < max_iter; ++result.iterations) {
    const double norm = max_abs(result.residual);
    if (norm < tol) {
      result.converged = true;
      return result;
    }
    for (std::size_t j = 0; j < d; ++j) {
      probe = result.x;
      probe[j] = result.x[j] + fd_step;
      const bool ok_plus = try_eval(f, probe, plus);
      probe[j] = result.x[j] - fd_step;
      const bool ok_minus = try_eval(f, probe, minus);
      if (!ok_plus || !ok_minus) return result;
      for (std::size_t i = 0; i < d; ++i) jac[i * d + j] = (plus[i] - minus[i]) / (2.0 * fd_step);
    }
    if (!solve_linear(jac, result.residual, d, delta)) return result;
    bool improved = false;
    for (double lambda = 1.0; lambda > 1e-6; lambda *= 0.5) {
      probe = result.x;
      for (std::size_t i = 0; i < d; ++i) probe[i] += lambda * delta[i];
      std::vector<double> r;
      if (try_eval(f, probe, r) && max_abs(r) < norm) {
        result.x = probe;
        result.residual = std::move(r);
        improved = true;
        break;
      }
    }
    if (!improved) return result;
  }
  result.converged = max_abs(result.residual) < tol;
  return result;
}

namespace {

struct Callback {
  const ScalarFunction* f;
  std::size_t d;
};

double gsl_objective(const gsl_vector* v, void* params) {
  const auto* cb = static_cast<const Callback*>(params);
  std::vector<double> x(cb->d);
  for (std::size_t i = 0; i < cb->d; ++i) x[i] = gsl_vector_get(v, i);
  try {
    const double y = (*cb->f)(x);
    return std::isfinite(y) ? y : std::numeric_limits<double>::infinity();
  } catch (const std::exception&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

SimplexResult nelder_mead(const ScalarFunction& f, const std::vector<double>& x0,
                          const std::vector<double>& step, double size_tol, int max_iter) {
  GslErrorsOff guard;
  const std::size_t d = x0.size();
  if (d == 0 || step.size() != d) throw InvalidArgument("nelder_mead: bad dimensions");
  Callback cb{&f, d};
  gsl_multimin_function fn{&gsl_objective, d, &cb};

  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(d), gsl_vector_free);
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> s(gsl_vector_alloc(d), gsl_vector_free);
  for (std::size_t i = 0; i < d; ++i) {
    gsl_vector_set(x.get(), i, x0[i]);
    gsl_vector_set(s.get(), i, step[i]);
  }
  std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> m(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, d),
      gsl_multimin_fminimizer_free);
  gsl_multimin_fminimizer_set(m.get(), &fn, x.get(), s.get());

  SimplexResult result;
  for (; result.iterations < max_iter; ++result.iterations) {
    if (gsl_multimin_fminimizer_iterate(m.get()) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(m.get()), size_tol) == GSL_SUCCESS) {
      result.converged = true;
      break;
    }
  }
  result.x.resize(d);
  for (std::size_t i = 0; i < d; ++i) result.x[i] = gsl_vector_get(m->x, i);
  result.value = m->fval;
  return result;
}

}  // namespace dpprior::detail
