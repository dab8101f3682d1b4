#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace dpprior {

/// log Γ(x) for x > 0. Throws DomainError otherwise.
double log_gamma(double x);

/// ψ₀(x), the digamma function, for x > 0.
double digamma(double x);

/// ψ₁(x), the trigamma function, for x > 0.
double trigamma(double x);

/// Regularized lower incomplete gamma P(s, t) = γ(s, t) / Γ(s), s > 0, t >= 0.
double reg_lower_incomplete_gamma(double s, double t);

/// Regularized upper incomplete gamma Q(s, t) = 1 - P(s, t), computed without
/// cancellation in the upper tail.
double reg_upper_incomplete_gamma(double s, double t);

/// log Σ exp(vᵢ). Returns -inf when every value is -inf.
double log_sum_exp(std::span<const double> values);
double log_sum_exp(double a, double b);

/// log Γ(α + n) - log Γ(α + 1) for α >= 0 and integer n >= 1. Finite at α = 0
/// and accurate for α much larger than n.
double log_rising_ratio(double alpha, int n);

/// Log-space triangle of unsigned Stirling numbers of the first kind,
/// entries log s(n, k) for 1 <= k <= n <= n_max. Immutable once built.
class StirlingTable {
 public:
  explicit StirlingTable(int n_max);

  int n_max() const { return n_max_; }

  /// log s(n, k). Throws InvalidArgument outside 1 <= k <= n <= n_max.
  double log_s(int n, int k) const;

  /// Row n as a contiguous span over k = 1..n.
  std::span<const double> row(int n) const;

 private:
  static std::size_t offset(int n) {
    return static_cast<std::size_t>(n - 1) * static_cast<std::size_t>(n) / 2;
  }

  int n_max_;
  std::vector<double> entries_;
};

/// Process-wide cache: returns a shared table with n_max() >= n_max. Tables
/// are never mutated after construction, so the pointer can be shared freely.
std::shared_ptr<const StirlingTable> shared_stirling_table(int n_max);

}  // namespace dpprior
