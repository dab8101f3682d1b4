#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "dpprior/priors.hpp"
#include "dpprior/samplers.hpp"

namespace dpprior {

// Sample-size-independent elicitation and stick-weight densities.

enum class ElicitFamily { Gamma, Exponential, Lognormal, HalfCauchy };

ElicitFamily parse_elicit_family(const std::string& name);
std::string to_string(ElicitFamily family);
/// Number of free parameters: 2 for gamma and lognormal, 1 otherwise.
int free_parameters(ElicitFamily family);

/// Partition (0, t₁], (t₁, t₂], …, (t_d, ∞) with a target probability for
/// each piece.
struct ElicitationProblem {
  ElicitFamily family = ElicitFamily::Gamma;
  std::vector<double> thresholds;
  std::vector<double> probabilities;  // thresholds.size() + 1 entries
};

/// Throws InvalidArgument when probabilities are not positive, do not sum to
/// 1 within 1e-12, or thresholds are not positive and strictly increasing.
void validate(const ElicitationProblem& problem);

struct ElicitationResult {
  PriorSpec prior;
  std::vector<double> eta;       // (shape, rate), (rate), (meanlog, sdlog) or (scale)
  std::vector<double> residuals;  // fitted minus target, one per partition piece
  int iterations = 0;
};

/// Solves cdf(tᵢ) - cdf(tᵢ₋₁) = pᵢ by damped Newton on log-parameters
/// (identity for the lognormal meanlog). When more pieces are given than the
/// family has parameters, the extra ones must be implied by the fit;
/// otherwise InfeasibleTargets names the first violated piece.
ElicitationResult elicit(const ElicitationProblem& problem);

/// η = -log(1 - p) / t₁, the exponential rate with p(α ≤ t₁) = p.
double elicit_exponential_closed_form(double t1, double p);

/// Lognormal quantile match: σ = (log t₂ - log t₁)/(z₂ - z₁), μ = log t₁ - σ z₁.
std::vector<double> elicit_lognormal_closed_form(double t1, double t2, double p_below_t1,
                                                 double p_below_t2);

/// Half-Cauchy scale with p(α ≤ t₁) = p: t₁ / tan(πp/2).
double elicit_half_cauchy_closed_form(double t1, double p);

nlohmann::json to_json(const ElicitationProblem& problem);
ElicitationProblem elicitation_problem_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ElicitationResult& result);

// ---------------------------------------------------------------------------
// Size-biased weights. Points must be strictly inside the simplex; boundary
// points raise DomainError.

/// α²/(1-w₁) · (1-w₁-w₂)^{α-1}
double sb_joint_density(double w1, double w2, double alpha);

/// α^H (1-Σw)^{α-1} / Π_{j<H} (1 - w₁ - … - w_j)
double sb_joint_density_prefix(std::span<const double> w, double alpha);

/// The Ga(a, b) mixtures in closed form.
double sb_mixed_gamma_density(double w1, double w2, double a, double b);
double sb_mixed_gamma_marginal(double w1, double a, double b);
double sb_mixed_gamma_cdf_w1(double x, double a, double b);

/// ∫ sb_joint_density dp(α) by quadrature; proper priors only.
double sb_mixed_density(double w1, double w2, const PriorSpec& prior,
                        const QuadratureOptions& options = {});

// ---------------------------------------------------------------------------
// Ranked weights on E = {w₁↓ + w₂↓ < 1, w₂↓ < w₁↓}.

/// The subregion A of E where w₂↓ ≥ (1 - w₁↓)/2 and F_α saturates at 1.
bool in_ranked_region_a(double w1, double w2);

/// α² (1-w₁-w₂)^{α-1} / (w₁w₂) · F_α(w₂/(1-w₁-w₂)), F from the cache
/// (exactly 1 on A).
double ranked_joint_density(double w1, double w2, double alpha, const FAlphaCache& cache);

/// The same formula with F ≡ 1, valid on A only.
double ranked_joint_density_a(double w1, double w2, double alpha);

/// F̂ is piecewise linear in log α, so the default tolerance is looser than
/// for the smooth size-biased integrand.
double ranked_mixed_density(double w1, double w2, const PriorSpec& prior, const FAlphaCache& cache,
                            const QuadratureOptions& options = {.rel_tol = 1e-8});

// ---------------------------------------------------------------------------
// Monotonicity regimes of the conditional slices.

struct RegimeReport {
  double alpha = 0.0;
  std::string sb_w1;      // behaviour of p(w₁ | w₂, α)
  std::string sb_w2;      // behaviour of p(w₂ | w₁, α)
  std::string ranked_w1;  // behaviour of p|_A(w₁↓ | w₂↓, α)
  std::string ranked_w2;
  std::string label() const { return sb_w1 + "/" + sb_w2; }
  std::string ranked_label() const { return ranked_w1 + "/" + ranked_w2; }
  /// 1/(2-α) when a stationary point exists: the size-biased maximizer
  /// w₁ = 1 - w₂/(2-α) for 1 < α < 2 and the ranked minimizer
  /// w₁↓ = (1 - w₂↓)/(2-α) for 0 < α < 1.
  std::optional<double> stationary_coefficient;
};

/// Labels follow the sign analysis of the analytic partial derivatives. At
/// α = 2 the size-biased w₁ slice is "decreasing" for w₂ > 0 (constant only
/// on the w₂ = 0 edge, which is outside the open simplex).
RegimeReport regime_derivative_signs(double alpha);

/// Analytic partial derivatives (∂/∂w₁, ∂/∂w₂).
std::pair<double, double> sb_density_gradient(double w1, double w2, double alpha);
std::pair<double, double> ranked_a_density_gradient(double w1, double w2, double alpha);

/// 1 - w₂/(2-α); DomainError unless 1 < α < 2.
double sb_maximizer_w1(double alpha, double w2);

/// (1 - w₂↓)/(2-α); DomainError unless 0 < α < 1. By symmetry the w₂↓
/// minimizer is ranked_minimizer(alpha, w₁↓).
double ranked_minimizer(double alpha, double other);

}  // namespace dpprior
