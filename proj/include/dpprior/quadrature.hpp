#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace dpprior {

struct QuadratureOptions {
  double rel_tol = 1e-11;
  double abs_tol = 1e-15;
  std::size_t max_panels = 20000;
};

struct QuadratureResult {
  std::vector<double> values;
  double error_estimate = 0.0;  // L1 norm over components
  std::size_t panels = 0;
  bool converged = false;
};

/// Vector integrand: writes f(x) into out (size = dimension).
using VectorIntegrand = std::function<void(double x, std::span<double> out)>;

/// Adaptive Gauss-Legendre over [lo, hi]. Each panel is estimated with a
/// 10-point rule and with the same rule on its two halves; the panel with the
/// largest disagreement is bisected until the summed disagreement falls below
/// max(abs_tol, rel_tol * |I|) (L1 over components). Endpoints are never
/// evaluated.
QuadratureResult integrate_adaptive(const VectorIntegrand& f, std::size_t dimension,
                                    double lo, double hi,
                                    const QuadratureOptions& options = {});

/// Scalar convenience wrapper.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double lo,
                                    double hi, const QuadratureOptions& options = {});

}  // namespace dpprior
