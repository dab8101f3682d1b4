#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "dpprior/kn.hpp"

namespace dpprior {

// Sample-size-dependent choices of Ga(a, b) for α.

enum class KlDirection {
  TargetToInduced,  // D(target ‖ induced), the reference direction
  InducedToTarget,
};

double kl_divergence(std::span<const double> p, std::span<const double> q);

std::vector<double> uniform_target(int n);

struct DoroOptions {
  KlDirection direction = KlDirection::TargetToInduced;
  QuadratureOptions quadrature{};
  double size_tol = 1e-7;  // simplex size in (log a, log b)
  int max_iter = 2000;
};

struct DoroFit {
  int n = 0;
  double a = 0.0;
  double b = 0.0;
  double kl = 0.0;
  std::vector<double> target;
  KlDirection direction = KlDirection::TargetToInduced;
  int iterations = 0;
};

/// KL between the target and the p(Kₙ) induced by Ga(a, b).
double doro_objective(int n, std::span<const double> target, double a, double b,
                      const StirlingTable& table, const DoroOptions& options = {});

/// Minimizes doro_objective over (log a, log b) by Nelder–Mead from a 3×3
/// grid of starts, then restarts once from the best vertex.
DoroFit doro_fit(int n, std::span<const double> target, const StirlingTable& table,
                 const DoroOptions& options = {});

struct ScalFit {
  int n = 0;
  double a = 0.0;
  double b = 0.0;
  int c = 0;
  double c0 = 0.0;
  double p1_target = 0.0;
  double tail_target = 0.0;
  double p1 = 0.0;    // achieved p(Kₙ = 1)
  double tail = 0.0;  // achieved p(Kₙ ≥ c)
  int iterations = 0;
  std::string method;  // "newton" or "bisection"
};

/// ⌈c0 log n⌉
int scal_cutoff(int n, double c0);

/// p(Kₙ = 1) and p(Kₙ ≥ c) under Ga(a, b).
std::pair<double, double> scal_probabilities(int n, int c, double a, double b,
                                             const StirlingTable& table);

/// Solves p(Kₙ = 1) = p1_target, p(Kₙ ≥ ⌈c0 log n⌉) = tail_target for (a, b).
ScalFit scal_fit(int n, double p1_target, double tail_target, double c0,
                 const StirlingTable& table);

/// a = b = e^{-0.033 n}
std::pair<double, double> scal_approx(int n);

struct DiffuseSummary {
  int n = 0;
  int mode = 1;
  double coverage = 0.9;
  int lower = 1;  // smallest k with P(Kₙ ≤ k) ≥ (1 - coverage)/2
  int upper = 1;  // smallest k with P(Kₙ ≤ k) ≥ (1 + coverage)/2
  double mean = 1.0;
  double entropy = 0.0;
  double kl_to_uniform = 0.0;  // log n - entropy
};

DiffuseSummary diffuse_summary(int n, double a, double b, const StirlingTable& table,
                               double coverage = 0.9);

nlohmann::json to_json(const DoroFit& fit);
nlohmann::json to_json(const ScalFit& fit);
nlohmann::json to_json(const DiffuseSummary& summary);

}  // namespace dpprior
