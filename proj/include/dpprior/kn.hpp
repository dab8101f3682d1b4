#pragma once

#include <vector>

#include "dpprior/priors.hpp"
#include "dpprior/special.hpp"

namespace dpprior {

/// Distribution of the cluster count Kₙ over k = 1..n. probs[k-1] = p(Kₙ = k).
struct KnPmf {
  int n = 0;
  std::vector<double> probs;
  // 1 - Σ probs before renormalization (mixed pmfs only; 0 otherwise).
  double mass_deficit = 0.0;

  double at(int k) const { return probs.at(static_cast<std::size_t>(k - 1)); }
  double mean() const;
  double variance() const;
};

struct KnMoments {
  double mean;
  double variance;
};

/// log p(Kₙ = k | α) = log s(n,k) + k log α + log Γ(α) - log Γ(α+n).
double log_pmf_kn_given_alpha(int n, int k, double alpha, const StirlingTable& table);

/// Exact mean and variance of Kₙ | α as sums of Bernoulli(α/(α+i-1)) moments.
KnMoments kn_moments_given_alpha(int n, double alpha);

KnPmf kn_pmf_given_alpha(int n, double alpha, const StirlingTable& table);

/// p(Kₙ = k) = ∫ p(Kₙ = k | α) dp(α), all k in one adaptive pass, then
/// renormalized. Throws UnsupportedPrior for improper priors.
KnPmf kn_pmf_mixed(int n, const PriorSpec& prior, const StirlingTable& table,
                   const QuadratureOptions& options = {});

/// Total variation distance between p(Kₙ | α) and Po(E[Kₙ | α]) on k >= 0.
double tv_to_poisson(int n, double alpha, const StirlingTable& table);

/// b / (b + log n), the success parameter of the negative-binomial limit of
/// Kₙ under α ~ Ga(a, b). n is real so the b = log n case can be hit exactly.
double nb_limit_success_probability(double n, double b);

/// NB(a, b/(b + log n)) on k = 0, 1, ..., truncated to 1..n and renormalized.
KnPmf nb_limit_pmf(int n, double a, double b);

/// ½ Σ |p - q| over a common support 1..n.
double total_variation(const KnPmf& p, const KnPmf& q);

}  // namespace dpprior
