#include "dpprior/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <string>

#include "dpprior/errors.hpp"

namespace dpprior {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_positive(double x, const char* fn) {
  if (!(x > 0.0) || std::isnan(x)) {
    throw DomainError(std::string(fn) + ": argument must be > 0, got " +
                      std::to_string(x));
  }
}

// Series expansion for P(s, t), convergent for t < s + 1.
double lower_gamma_series(double s, double t) {
  double term = 1.0 / s;
  double sum = term;
  for (int k = 1; k < 100000; ++k) {
    term *= t / (s + k);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return std::exp(s * std::log(t) - t - log_gamma(s)) * sum;
}

// Modified Lentz continued fraction for Q(s, t), used for t >= s + 1.
double upper_gamma_cf(double s, double t) {
  constexpr double tiny = 1e-300;
  double b = t + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(s * std::log(t) - t - log_gamma(s)) * h;
}

}  // namespace

double log_gamma(double x) {
  require_positive(x, "log_gamma");
  if (std::isinf(x)) return kInf;
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double digamma(double x) {
  require_positive(x, "digamma");
  double acc = 0.0;
  while (x < 6.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Asymptotic series with Bernoulli coefficients B_2k / (2k).
  const double series =
      inv2 * (1.0 / 12 -
              inv2 * (1.0 / 120 -
                      inv2 * (1.0 / 252 -
                              inv2 * (1.0 / 240 -
                                      inv2 * (1.0 / 132 - inv2 * (691.0 / 32760 - inv2 / 12.0))))));
  return acc + std::log(x) - 0.5 * inv - series;
}

double trigamma(double x) {
  require_positive(x, "trigamma");
  double acc = 0.0;
  while (x < 6.0) {
    acc += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double series =
      inv * (1.0 +
             inv * (0.5 +
                    inv * (1.0 / 6 -
                           inv2 * (1.0 / 30 -
                                   inv2 * (1.0 / 42 -
                                           inv2 * (1.0 / 30 -
                                                   inv2 * (5.0 / 66 - inv2 * (691.0 / 2730 - inv2 * 7.0 / 6))))))));
  return acc + series;
}

double reg_lower_incomplete_gamma(double s, double t) {
  require_positive(s, "reg_lower_incomplete_gamma");
  if (!(t >= 0.0)) {
    throw DomainError("reg_lower_incomplete_gamma: t must be >= 0");
  }
  if (t == 0.0) return 0.0;
  if (std::isinf(t)) return 1.0;
  if (t < s + 1.0) return std::min(1.0, lower_gamma_series(s, t));
  return std::clamp(1.0 - upper_gamma_cf(s, t), 0.0, 1.0);
}

double reg_upper_incomplete_gamma(double s, double t) {
  require_positive(s, "reg_upper_incomplete_gamma");
  if (!(t >= 0.0)) {
    throw DomainError("reg_upper_incomplete_gamma: t must be >= 0");
  }
  if (t == 0.0) return 1.0;
  if (std::isinf(t)) return 0.0;
  if (t < s + 1.0) return std::clamp(1.0 - lower_gamma_series(s, t), 0.0, 1.0);
  return std::min(1.0, upper_gamma_cf(s, t));
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("log_sum_exp: empty input");
  const double m = *std::max_element(values.begin(), values.end());
  if (m == -kInf) return -kInf;
  if (m == kInf) return kInf;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - m);
  return m + std::log(sum);
}

double log_sum_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (a == -kInf) return -kInf;
  return a + std::log1p(std::exp(b - a));
}

double log_rising_ratio(double alpha, int n) {
  if (!(alpha >= 0.0)) throw DomainError("log_rising_ratio: alpha must be >= 0");
  if (n < 1) throw InvalidArgument("log_rising_ratio: n must be >= 1");
  if (n == 1) return 0.0;
  // Γ(α+n)/Γ(α+1) = Π_{i=1}^{n-1} (α + i). For α far above n the lgamma
  // difference cancels badly, so sum the logs directly.
  if (alpha > 16.0 * n) {
    const double la = std::log(alpha);
    double acc = 0.0;
    for (int i = 1; i < n; ++i) acc += std::log1p(i / alpha);
    return (n - 1) * la + acc;
  }
  return log_gamma(alpha + n) - log_gamma(alpha + 1.0);
}

StirlingTable::StirlingTable(int n_max) : n_max_(n_max) {
  if (n_max < 1) {
    throw InvalidArgument("StirlingTable: n_max must be >= 1");
  }
  entries_.assign(offset(n_max + 1), -kInf);
  entries_[offset(1)] = 0.0;
  // s(n, k) = s(n-1, k-1) + (n-1) s(n-1, k)
  for (int n = 2; n <= n_max; ++n) {
    const double log_m = std::log(static_cast<double>(n - 1));
    const double* prev = entries_.data() + offset(n - 1);
    double* cur = entries_.data() + offset(n);
    for (int k = 1; k <= n; ++k) {
      const double from_left = k >= 2 ? prev[k - 2] : -kInf;
      const double from_same = k <= n - 1 ? prev[k - 1] + log_m : -kInf;
      cur[k - 1] = log_sum_exp(from_left, from_same);
    }
  }
}

double StirlingTable::log_s(int n, int k) const {
  if (n < 1 || n > n_max_ || k < 1 || k > n) {
    throw InvalidArgument("StirlingTable: (n, k) = (" + std::to_string(n) + ", " +
                          std::to_string(k) + ") outside table with n_max " +
                          std::to_string(n_max_));
  }
  return entries_[offset(n) + static_cast<std::size_t>(k - 1)];
}

std::span<const double> StirlingTable::row(int n) const {
  if (n < 1 || n > n_max_) {
    throw InvalidArgument("StirlingTable: row " + std::to_string(n) + " outside table");
  }
  return {entries_.data() + offset(n), static_cast<std::size_t>(n)};
}

std::shared_ptr<const StirlingTable> shared_stirling_table(int n_max) {
  static std::mutex mutex;
  static std::shared_ptr<const StirlingTable> cached;
  std::lock_guard lock(mutex);
  if (!cached || cached->n_max() < n_max) {
    cached = std::make_shared<const StirlingTable>(std::max(n_max, 1));
  }
  return cached;
}

}  // namespace dpprior
