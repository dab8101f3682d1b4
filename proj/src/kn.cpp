#include "dpprior/kn.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "dpprior/errors.hpp"

namespace dpprior {

namespace {

void check_n(int n, const StirlingTable& table) {
  if (n < 1) throw InvalidArgument("n must be >= 1");
  if (n > table.n_max()) {
    throw InvalidArgument("n = " + std::to_string(n) + " exceeds Stirling table n_max " +
                          std::to_string(table.n_max()));
  }
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw DomainError("alpha must be a finite positive number");
  }
}

// p(Kₙ = k | α) for all k, valid down to α = 0 where the mass sits on k = 1.
void fill_conditional_pmf(int n, double alpha, std::span<const double> log_s,
                          std::span<double> out) {
  if (alpha == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    out[0] = 1.0;
    return;
  }
  const double la = std::log(alpha);
  const double base = -log_rising_ratio(alpha, n);
  for (int k = 1; k <= n; ++k) {
    out[k - 1] = std::exp(log_s[k - 1] + (k - 1) * la + base);
  }
}

}  // namespace

double KnPmf::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) m += (i + 1.0) * probs[i];
  return m;
}

double KnPmf::variance() const {
  const double m = mean();
  double v = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double d = i + 1.0 - m;
    v += d * d * probs[i];
  }
  return v;
}

double log_pmf_kn_given_alpha(int n, int k, double alpha, const StirlingTable& table) {
  check_n(n, table);
  if (k < 1 || k > n) {
    throw InvalidArgument("k = " + std::to_string(k) + " outside 1.." + std::to_string(n));
  }
  check_alpha(alpha);
  // k log α + log Γ(α) - log Γ(α+n) = (k-1) log α - [log Γ(α+n) - log Γ(α+1)]
  return table.log_s(n, k) + (k - 1) * std::log(alpha) - log_rising_ratio(alpha, n);
}

KnMoments kn_moments_given_alpha(int n, double alpha) {
  if (n < 1) throw InvalidArgument("n must be >= 1");
  check_alpha(alpha);
  KnMoments m{0.0, 0.0};
  for (int i = 1; i <= n; ++i) {
    const double d = alpha + i - 1.0;
    m.mean += alpha / d;
    m.variance += alpha * (i - 1.0) / (d * d);
  }
  return m;
}

KnPmf kn_pmf_given_alpha(int n, double alpha, const StirlingTable& table) {
  check_n(n, table);
  check_alpha(alpha);
  KnPmf pmf;
  pmf.n = n;
  pmf.probs.resize(static_cast<std::size_t>(n));
  fill_conditional_pmf(n, alpha, table.row(n), pmf.probs);
  return pmf;
}

KnPmf kn_pmf_mixed(int n, const PriorSpec& prior, const StirlingTable& table,
                   const QuadratureOptions& options) {
  check_n(n, table);
  if (!is_proper(prior)) {
    throw UnsupportedPrior("prior '" + family_name(prior) +
                           "' is improper: the induced p(Kn) cannot be normalised");
  }
  validate(prior);
  KnPmf pmf;
  pmf.n = n;
  if (n == 1) {
    pmf.probs = {1.0};
    return pmf;
  }
  const auto log_s = table.row(n);
  auto integrand = [&](double alpha, std::span<double> out) {
    fill_conditional_pmf(n, alpha, log_s, out);
  };
  QuadratureResult r = integrate_over_prior(prior, integrand, static_cast<std::size_t>(n), options);
  const double total = std::accumulate(r.values.begin(), r.values.end(), 0.0);
  if (!(total > 0.0)) {
    throw ConvergenceError("kn_pmf_mixed: quadrature produced no mass", r.values);
  }
  pmf.mass_deficit = 1.0 - total;
  pmf.probs = std::move(r.values);
  for (double& p : pmf.probs) p = std::max(p, 0.0) / total;
  return pmf;
}

double tv_to_poisson(int n, double alpha, const StirlingTable& table) {
  const KnPmf pmf = kn_pmf_given_alpha(n, alpha, table);
  const double lambda = kn_moments_given_alpha(n, alpha).mean;
  const double log_lambda = std::log(lambda);
  // Sum |p - Po| exactly on k = 0..n and beyond until the Poisson mode has
  // passed; the remaining Poisson tail is added in closed form.
  const int k_end = std::max(n, static_cast<int>(std::ceil(lambda)) + 1);
  double acc = 0.0;
  for (int k = 0; k <= k_end; ++k) {
    const double po = std::exp(k * log_lambda - lambda - log_gamma(k + 1.0));
    const double p = (k >= 1 && k <= n) ? pmf.probs[static_cast<std::size_t>(k - 1)] : 0.0;
    acc += std::abs(p - po);
  }
  // P(Po > k_end) = P(k_end + 1, λ) (regularized lower incomplete gamma).
  acc += reg_lower_incomplete_gamma(k_end + 1.0, lambda);
  return 0.5 * acc;
}

double nb_limit_success_probability(double n, double b) {
  if (!(n > 1.0)) throw DomainError("nb_limit_success_probability: n must be > 1");
  if (!(b > 0.0)) throw DomainError("nb_limit_success_probability: b must be > 0");
  return b / (b + std::log(n));
}

KnPmf nb_limit_pmf(int n, double a, double b) {
  if (n < 2) throw InvalidArgument("nb_limit_pmf: n must be >= 2");
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("nb_limit_pmf: a and b must be > 0");
  const double p = nb_limit_success_probability(n, b);
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  KnPmf pmf;
  pmf.n = n;
  pmf.probs.resize(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    pmf.probs[k - 1] = std::exp(log_gamma(k + a) - log_gamma(a) - log_gamma(k + 1.0) +
                                a * log_p + k * log_q);
  }
  const double total = std::accumulate(pmf.probs.begin(), pmf.probs.end(), 0.0);
  for (double& v : pmf.probs) v /= total;
  return pmf;
}

double total_variation(const KnPmf& p, const KnPmf& q) {
  if (p.probs.size() != q.probs.size()) {
    throw InvalidArgument("total_variation: supports differ");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < p.probs.size(); ++i) acc += std::abs(p.probs[i] - q.probs[i]);
  return 0.5 * acc;
}

}  // namespace dpprior
