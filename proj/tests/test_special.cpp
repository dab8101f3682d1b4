#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "dpprior/errors.hpp"
#include "dpprior/special.hpp"

using namespace dpprior;
using doctest::Approx;
using BigFloat = boost::multiprecision::cpp_bin_float_50;

namespace {

// Slow summation oracles: push the argument far out with the recurrence, then
// a short asymptotic tail that is negligible at y > 1000.
double digamma_oracle(double x) {
  long double acc = 0.0L;
  long double y = x;
  for (int k = 0; k < 2000; ++k) acc -= 1.0L / (y + k);
  y += 2000;
  return static_cast<double>(acc + std::log(y) - 1.0L / (2 * y) - 1.0L / (12 * y * y) +
                             1.0L / (120 * y * y * y * y));
}

double trigamma_oracle(double x) {
  long double acc = 0.0L;
  long double y = x;
  for (int k = 0; k < 2000; ++k) acc += 1.0L / ((y + k) * (y + k));
  y += 2000;
  return static_cast<double>(acc + 1.0L / y + 1.0L / (2 * y * y) + 1.0L / (6 * y * y * y));
}

// Count permutations of {0..n-1} by number of cycles.
std::vector<std::uint64_t> cycle_counts(int n) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::uint64_t> counts(n + 1, 0);
  do {
    std::vector<bool> seen(n, false);
    int cycles = 0;
    for (int i = 0; i < n; ++i) {
      if (seen[i]) continue;
      ++cycles;
      for (int j = i; !seen[j]; j = perm[j]) seen[j] = true;
    }
    ++counts[cycles];
  } while (std::next_permutation(perm.begin(), perm.end()));
  return counts;
}

}  // namespace

TEST_CASE("log_gamma matches identities and a 50-digit oracle") {
  CHECK(log_gamma(1.0) == Approx(0.0));
  CHECK(log_gamma(0.5) == Approx(0.5 * std::log(std::numbers::pi)).epsilon(1e-14));
  CHECK(log_gamma(10.0) == Approx(std::log(362880.0)).epsilon(1e-14));
  for (double x : {1e-8, 1e-3, 0.1, 0.5, 0.75, 3.5, 7.25, 10.0, 123.456, 1e4, 1e7}) {
    const double oracle = static_cast<double>(boost::math::lgamma(BigFloat(x)));
    CHECK(std::abs(log_gamma(x) - oracle) <= 1e-12 * std::abs(oracle));
  }
  CHECK_THROWS_AS(log_gamma(0.0), DomainError);
  CHECK_THROWS_AS(log_gamma(-1.0), DomainError);
}

TEST_CASE("digamma and trigamma") {
  CHECK(std::abs(digamma(1.0) + 0.5772156649015329) < 1e-10);
  CHECK(std::abs(trigamma(1.0) - std::numbers::pi * std::numbers::pi / 6) < 1e-10);
  CHECK(std::abs(digamma(2.0) - digamma(1.0) - 1.0) < 1e-12);
  CHECK(std::abs(digamma(1.0) - digamma_oracle(1.0)) < 1e-10);

  for (double x = 0.1; x < 50.0; x += 0.37) {
    CHECK(std::abs(digamma(x) - digamma_oracle(x)) < 1e-10);
    CHECK(std::abs(trigamma(x) - trigamma_oracle(x)) < 1e-10);
    CHECK(std::abs(digamma(x + 1) - digamma(x) - 1.0 / x) < 1e-10);
    CHECK(std::abs(trigamma(x + 1) - trigamma(x) + 1.0 / (x * x)) < 1e-10);
  }
  CHECK_THROWS_AS(digamma(0.0), DomainError);
  CHECK_THROWS_AS(trigamma(-2.0), DomainError);
}

TEST_CASE("regularized lower incomplete gamma") {
  CHECK(reg_lower_incomplete_gamma(2.5, 0.0) == 0.0);
  for (double t : {0.01, 0.5, 1.0, 3.0, 20.0}) {
    CHECK(std::abs(reg_lower_incomplete_gamma(1.0, t) + std::expm1(-t)) < 1e-14);
  }
  // P(1/2, 1/2) = erf(1/√2) = P(|Z| <= 1)
  CHECK(std::abs(reg_lower_incomplete_gamma(0.5, 0.5) - std::erf(1.0 / std::numbers::sqrt2)) <
        1e-12);
  for (double s : {1e-4, 0.003, 0.445, 1.814, 7.0, 55.0}) {
    for (double t : {1e-6, 0.1, 1.0, 2.0, 10.0, 60.0, 300.0}) {
      const double oracle = static_cast<double>(boost::math::gamma_p(BigFloat(s), BigFloat(t)));
      CHECK(std::abs(reg_lower_incomplete_gamma(s, t) - oracle) < 1e-12);
      CHECK(std::abs(reg_upper_incomplete_gamma(s, t) - (1.0 - oracle)) < 1e-12);
    }
  }
  CHECK_THROWS_AS(reg_lower_incomplete_gamma(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(reg_lower_incomplete_gamma(1.0, -1.0), DomainError);
}

TEST_CASE("log_sum_exp") {
  const std::vector<double> a{0.0, 0.0};
  CHECK(log_sum_exp(a) == Approx(std::log(2.0)));
  const std::vector<double> b{-1000.0, -1000.0};
  CHECK(log_sum_exp(b) == Approx(-1000.0 + std::log(2.0)));
  const std::vector<double> c{std::log(2.0), std::log(3.0)};
  CHECK(log_sum_exp(c) == Approx(std::log(5.0)));
  CHECK_THROWS_AS(log_sum_exp(std::span<const double>{}), InvalidArgument);
}

TEST_CASE("log_rising_ratio is continuous across its two branches") {
  for (int n : {2, 10, 100}) {
    const double edge = 16.0 * n;
    const double below = log_rising_ratio(edge * (1 - 1e-12), n);
    const double above = log_rising_ratio(edge * (1 + 1e-12), n);
    CHECK(std::abs(below - above) < 1e-9 * std::abs(below));
  }
  CHECK(log_rising_ratio(0.0, 5) == Approx(std::log(24.0)));
}

TEST_CASE("Stirling table entries") {
  const StirlingTable t1(1);
  CHECK(t1.log_s(1, 1) == 0.0);

  const StirlingTable table(1000);
  CHECK(table.log_s(5, 1) == Approx(std::log(24.0)));
  const auto counts = cycle_counts(4);
  CHECK(counts[2] == 11);
  CHECK(table.log_s(4, 2) == Approx(std::log(11.0)));
  for (int n = 1; n <= 1000; n += 37) {
    CHECK(table.log_s(n, n) == Approx(0.0));
    CHECK(table.log_s(n, 1) == Approx(log_gamma(n)).epsilon(1e-12));
  }
  CHECK(std::isfinite(table.log_s(1000, 500)));
  CHECK_THROWS_AS(StirlingTable(0), InvalidArgument);
  CHECK_THROWS_AS(table.log_s(5, 6), InvalidArgument);
  CHECK_THROWS_AS(table.log_s(1001, 1), InvalidArgument);
}

TEST_CASE("Stirling table against permutation enumeration and the recurrence") {
  const StirlingTable table(12);
  for (int n = 1; n <= 8; ++n) {
    const auto counts = cycle_counts(n);
    for (int k = 1; k <= n; ++k) {
      CHECK(std::exp(table.log_s(n, k)) == Approx(static_cast<double>(counts[k])).epsilon(1e-12));
    }
  }
  for (int n = 2; n <= 12; ++n) {
    for (int k = 1; k <= n; ++k) {
      const double lhs = std::exp(table.log_s(n, k));
      const double a = k >= 2 ? std::exp(table.log_s(n - 1, k - 1)) : 0.0;
      const double b = k <= n - 1 ? (n - 1) * std::exp(table.log_s(n - 1, k)) : 0.0;
      CHECK(std::abs(lhs - (a + b)) <= 1e-9 * lhs);
    }
  }
}

TEST_CASE("Stirling rows generate the rising factorial") {
  const StirlingTable table(50);
  for (double x : {0.5, 1.0, 2.0}) {
    for (int n = 1; n <= 50; ++n) {
      std::vector<double> terms;
      for (int k = 1; k <= n; ++k) terms.push_back(table.log_s(n, k) + k * std::log(x));
      double log_rising = 0.0;
      for (int i = 0; i < n; ++i) log_rising += std::log(x + i);
      const double lhs = log_sum_exp(terms);
      CHECK(std::abs(std::expm1(lhs - log_rising)) < 1e-8);
    }
  }
}

TEST_CASE("shared table grows and is reused") {
  auto a = shared_stirling_table(20);
  auto b = shared_stirling_table(10);
  CHECK(a.get() == b.get());
  auto c = shared_stirling_table(40);
  CHECK(c->n_max() >= 40);
}
