#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "dpprior/quadrature.hpp"
#include "dpprior/special.hpp"

namespace dpprior {

// Prior families for the DP precision α.

struct GammaPrior {
  double shape;
  double rate;
};

struct ExponentialPrior {
  double rate;
};

/// Lognormal parameterized by mean and sd of log α.
struct LognormalPrior {
  double meanlog;
  double sdlog;
};

/// Half-Cauchy with location fixed at 0.
struct HalfCauchyPrior {
  double scale;
};

/// Jeffreys' prior for the cluster-count model at sample size n.
struct JeffreysPrior {
  int n;
};

/// p(α) ∝ 1/α.
struct ImproperReciprocalPrior {};

/// p(α) ∝ 1.
struct ImproperFlatPrior {};

using PriorSpec = std::variant<GammaPrior, ExponentialPrior, LognormalPrior, HalfCauchyPrior,
                               JeffreysPrior, ImproperReciprocalPrior, ImproperFlatPrior>;

std::string family_name(const PriorSpec& prior);
bool is_proper(const PriorSpec& prior);

/// Throws InvalidArgument if any parameter is out of range.
void validate(const PriorSpec& prior);

/// Log density at α > 0: normalized for the parametric families, the
/// unnormalized kernel for Jeffreys (log of jeffreys_fisher_root) and the
/// improper priors.
double log_density(const PriorSpec& prior, double alpha);

/// Normalized log density. Throws UnsupportedPrior for improper priors.
double log_density_normalized(const PriorSpec& prior, double alpha);

double cdf(const PriorSpec& prior, double x);
double quantile(const PriorSpec& prior, double q);

/// √I(α) = √((1/α) Σᵢ (i-1)/(α+i-1)²), via the ψ₀/ψ₁ identity. Returns 0 for n = 1.
double jeffreys_fisher_root(int n, double alpha);

/// Same quantity by the direct O(n) sum; kept for cross-validation.
double jeffreys_fisher_root_sum(int n, double alpha);

/// ∫₀^∞ jeffreys_fisher_root(n, α) dα. Cached per n.
double jeffreys_normalizer(int n);

/// (2/π) atan √x, the Jeffreys CDF at n = 2.
double jeffreys2_cdf_closed_form(double x);

/// 1 / (π (α+1) √α), the Jeffreys density at n = 2.
double jeffreys2_density_closed_form(double alpha);

/// ∫ f(α) p(α) dα for a proper prior, f vector-valued. f must accept α = 0
/// (the limit value) as well as very large α.
QuadratureResult integrate_over_prior(const PriorSpec& prior, const VectorIntegrand& f,
                                      std::size_t dimension,
                                      const QuadratureOptions& options = {});

double integrate_over_prior(const PriorSpec& prior, const std::function<double(double)>& f,
                            const QuadratureOptions& options = {});

/// Integrates an unnormalized prior kernel (log_density) times f over [lo, hi]
/// with 0 <= lo < hi <= ∞. Works for improper priors on bounded intervals.
double integrate_prior_kernel(const PriorSpec& prior, const std::function<double(double)>& f,
                              double lo, double hi, const QuadratureOptions& options = {});

struct ProprietyReport {
  double slope_at_zero;      // d log K / d log α as α → 0
  double slope_at_infinity;  // d log K / d log α as α → ∞
  bool integrable_at_zero;
  bool integrable_at_infinity;
  bool integrable() const { return integrable_at_zero && integrable_at_infinity; }
};

/// Tail exponents of the kernel α^k Γ(α)/Γ(α+n) · p(α), i.e. the posterior
/// p(α | Kₙ = k) up to a constant.
ProprietyReport propriety_diagnostic(const PriorSpec& prior, int n, int k);

/// p(Kₙ = 1) under Ga(a, b) for each (a, b) on the path.
std::vector<double> quasi_degenerate_probe(int n, std::span<const std::pair<double, double>> path,
                                           const StirlingTable& table);

nlohmann::json to_json(const PriorSpec& prior);

/// Accepts {"family": ..., "params": {...}} or {"family": ..., "params": [..]}.
/// When the family is "jeffreys" without an n, default_n is used.
PriorSpec prior_from_json(const nlohmann::json& j, int default_n = 0);

}  // namespace dpprior
