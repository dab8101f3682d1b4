#include "dpprior/ssi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "dpprior/errors.hpp"
#include "solvers.hpp"

namespace dpprior {

namespace {

constexpr double kPi = std::numbers::pi;

void require_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be a finite positive number");
}

void require_probability(double p, const char* who) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError(std::string(who) + ": probability must lie in (0, 1)");
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

PriorSpec make_prior(ElicitFamily family, std::span<const double> theta) {
  switch (family) {
    case ElicitFamily::Gamma: return GammaPrior{std::exp(theta[0]), std::exp(theta[1])};
    case ElicitFamily::Exponential: return ExponentialPrior{std::exp(theta[0])};
    case ElicitFamily::Lognormal: return LognormalPrior{theta[0], std::exp(theta[1])};
    case ElicitFamily::HalfCauchy: return HalfCauchyPrior{std::exp(theta[0])};
  }
  throw InvalidArgument("unknown family");
}

std::vector<double> eta_of(const PriorSpec& prior) {
  return std::visit(
      [](const auto& p) -> std::vector<double> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GammaPrior>) return {p.shape, p.rate};
        else if constexpr (std::is_same_v<T, ExponentialPrior>) return {p.rate};
        else if constexpr (std::is_same_v<T, LognormalPrior>) return {p.meanlog, p.sdlog};
        else if constexpr (std::is_same_v<T, HalfCauchyPrior>) return {p.scale};
        else return {};
      },
      prior);
}

std::vector<std::vector<double>> starting_points(ElicitFamily family, double t1) {
  const double lt = std::log(t1);
  switch (family) {
    case ElicitFamily::Gamma:
      return {{0.0, -lt}, {std::log(3.0), std::log(3.0) - lt}, {std::log(0.5), std::log(0.5) - lt},
              {std::log(10.0), std::log(10.0) - lt}};
    case ElicitFamily::Exponential: return {{-lt}};
    case ElicitFamily::Lognormal: return {{lt, 0.0}, {lt, std::log(0.3)}, {lt, std::log(3.0)}};
    case ElicitFamily::HalfCauchy: return {{lt}};
  }
  return {};
}

// Interval probabilities of the partition induced by the thresholds.
std::vector<double> piece_probabilities(const PriorSpec& prior, std::span<const double> t) {
  std::vector<double> out;
  double prev = 0.0;
  for (double x : t) {
    const double c = cdf(prior, x);
    out.push_back(c - prev);
    prev = c;
  }
  out.push_back(1.0 - prev);
  return out;
}

std::string piece_name(std::span<const double> t, std::size_t i) {
  const std::string lo = i == 0 ? "0" : fmt(t[i - 1]);
  const std::string hi = i == t.size() ? "inf" : fmt(t[i]);
  return "p(" + lo + " < alpha <= " + hi + ")";
}

void check_simplex(double w1, double w2) {
  if (!(w1 > 0.0) || !(w2 > 0.0) || !(w1 + w2 < 1.0)) {
    throw DomainError("(w1, w2) must lie strictly inside the simplex");
  }
}

void check_region_e(double w1, double w2) {
  if (!(w1 > 0.0) || !(w2 > 0.0) || !(w1 + w2 < 1.0) || !(w2 < w1)) {
    throw DomainError("(w1, w2) must satisfy w1 + w2 < 1 and 0 < w2 < w1");
  }
}

void check_gamma_params(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError("gamma hyperparameters must be finite and positive");
  }
}

}  // namespace

ElicitFamily parse_elicit_family(const std::string& name) {
  if (name == "gamma") return ElicitFamily::Gamma;
  if (name == "exponential") return ElicitFamily::Exponential;
  if (name == "lognormal") return ElicitFamily::Lognormal;
  if (name == "half_cauchy" || name == "half-cauchy") return ElicitFamily::HalfCauchy;
  throw InvalidArgument("unknown elicitation family '" + name +
                        "' (expected gamma, exponential, lognormal or half_cauchy)");
}

std::string to_string(ElicitFamily family) {
  switch (family) {
    case ElicitFamily::Gamma: return "gamma";
    case ElicitFamily::Exponential: return "exponential";
    case ElicitFamily::Lognormal: return "lognormal";
    case ElicitFamily::HalfCauchy: return "half_cauchy";
  }
  return "?";
}

int free_parameters(ElicitFamily family) {
  return family == ElicitFamily::Gamma || family == ElicitFamily::Lognormal ? 2 : 1;
}

void validate(const ElicitationProblem& problem) {
  const auto& t = problem.thresholds;
  const auto& p = problem.probabilities;
  if (t.empty()) throw InvalidArgument("elicitation needs at least one threshold");
  if (p.size() != t.size() + 1) {
    throw InvalidArgument("elicitation needs " + std::to_string(t.size() + 1) + " probabilities for " +
                          std::to_string(t.size()) + " thresholds, got " + std::to_string(p.size()));
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0.0) || !std::isfinite(t[i])) throw InvalidArgument("thresholds must be positive and finite");
    if (i > 0 && !(t[i] > t[i - 1])) throw InvalidArgument("thresholds must be strictly increasing");
  }
  double sum = 0.0;
  for (double x : p) {
    if (!(x > 0.0)) throw InvalidArgument("probabilities must be strictly positive");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw InvalidArgument("probabilities must sum to 1 (got " + fmt(sum) + ")");
  }
}

ElicitationResult elicit(const ElicitationProblem& problem) {
  validate(problem);
  const std::size_t d = static_cast<std::size_t>(free_parameters(problem.family));
  const auto& t = problem.thresholds;
  if (t.size() < d) {
    throw InvalidArgument(to_string(problem.family) + " has " + std::to_string(d) +
                          " free parameters and needs " + std::to_string(d) + " thresholds");
  }
  std::vector<double> cumulative(d);
  std::partial_sum(problem.probabilities.begin(), problem.probabilities.begin() + d, cumulative.begin());

  auto residual = [&](std::span<const double> theta) {
    const PriorSpec prior = make_prior(problem.family, theta);
    std::vector<double> r(d);
    for (std::size_t i = 0; i < d; ++i) r[i] = cdf(prior, t[i]) - cumulative[i];
    return r;
  };

  std::optional<detail::NewtonResult> best;
  for (const auto& start : starting_points(problem.family, t[0])) {
    auto r = detail::damped_newton(residual, start, 1e-13, 200);
    if (r.converged) {
      best = std::move(r);
      break;
    }
    if (!best || detail::max_abs(r.residual) < detail::max_abs(best->residual)) best = std::move(r);
  }
  if (!best->converged && detail::max_abs(best->residual) > 1e-10) {
    std::size_t worst = 0;
    for (std::size_t i = 1; i < d; ++i) {
      if (std::abs(best->residual[i]) > std::abs(best->residual[worst])) worst = i;
    }
    throw InfeasibleTargets(to_string(problem.family) + " cannot attain " + piece_name(t, worst) + " = " +
                            fmt(problem.probabilities[worst]) + " jointly with the other targets");
  }

  ElicitationResult result;
  result.prior = make_prior(problem.family, best->x);
  result.eta = eta_of(result.prior);
  result.iterations = best->iterations;
  const auto fitted = piece_probabilities(result.prior, t);
  for (std::size_t i = 0; i < fitted.size(); ++i) {
    result.residuals.push_back(fitted[i] - problem.probabilities[i]);
  }
  for (std::size_t i = d; i < fitted.size(); ++i) {
    if (std::abs(result.residuals[i]) > 1e-8) {
      throw InfeasibleTargets(to_string(problem.family) + " has " + std::to_string(d) +
                              " free parameter(s); the fit implies " + piece_name(t, i) + " = " +
                              fmt(fitted[i]) + ", not " + fmt(problem.probabilities[i]));
    }
  }
  return result;
}

double elicit_exponential_closed_form(double t1, double p) {
  if (!(t1 > 0.0) || !std::isfinite(t1)) throw DomainError("t1 must be positive");
  require_probability(p, "elicit_exponential_closed_form");
  return -std::log1p(-p) / t1;
}

std::vector<double> elicit_lognormal_closed_form(double t1, double t2, double p_below_t1,
                                                 double p_below_t2) {
  if (!(t1 > 0.0) || !(t2 > t1)) throw DomainError("need 0 < t1 < t2");
  require_probability(p_below_t1, "elicit_lognormal_closed_form");
  require_probability(p_below_t2, "elicit_lognormal_closed_form");
  if (!(p_below_t2 > p_below_t1)) throw DomainError("cumulative probabilities must increase");
  const boost::math::normal z;
  const double z1 = boost::math::quantile(z, p_below_t1);
  const double z2 = boost::math::quantile(z, p_below_t2);
  const double sigma = (std::log(t2) - std::log(t1)) / (z2 - z1);
  return {std::log(t1) - sigma * z1, sigma};
}

double elicit_half_cauchy_closed_form(double t1, double p) {
  if (!(t1 > 0.0) || !std::isfinite(t1)) throw DomainError("t1 must be positive");
  require_probability(p, "elicit_half_cauchy_closed_form");
  return t1 / std::tan(0.5 * kPi * p);
}

nlohmann::json to_json(const ElicitationProblem& problem) {
  return {{"family", to_string(problem.family)},
          {"thresholds", problem.thresholds},
          {"probabilities", problem.probabilities}};
}

ElicitationProblem elicitation_problem_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("elicitation problem must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key != "family" && key != "thresholds" && key != "probabilities") {
      throw InvalidArgument("unknown key '" + key + "' in elicitation problem");
    }
  }
  try {
    ElicitationProblem p;
    p.family = parse_elicit_family(j.at("family").get<std::string>());
    p.thresholds = j.at("thresholds").get<std::vector<double>>();
    p.probabilities = j.at("probabilities").get<std::vector<double>>();
    validate(p);
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed elicitation problem: ") + e.what());
  }
}

nlohmann::json to_json(const ElicitationResult& result) {
  return {{"prior", to_json(result.prior)},
          {"eta", result.eta},
          {"residuals", result.residuals},
          {"solver_iters", result.iterations}};
}

// ---------------------------------------------------------------------------

double sb_joint_density(double w1, double w2, double alpha) {
  check_simplex(w1, w2);
  require_alpha(alpha);
  const double s = (1.0 - w1) - w2;
  return std::exp(2.0 * std::log(alpha) - std::log1p(-w1) + (alpha - 1.0) * std::log(s));
}

double sb_joint_density_prefix(std::span<const double> w, double alpha) {
  require_alpha(alpha);
  if (w.empty()) throw DomainError("sb_joint_density_prefix: need at least one weight");
  double rest = 1.0;
  double log_den = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (!(w[j] > 0.0)) throw DomainError("weights must be positive");
    if (j > 0) log_den += std::log(rest);
    rest -= w[j];
    if (!(rest > 0.0)) throw DomainError("partial sums of the weights must stay below 1");
  }
  return std::exp(w.size() * std::log(alpha) + (alpha - 1.0) * std::log(rest) - log_den);
}

double sb_mixed_gamma_density(double w1, double w2, double a, double b) {
  check_simplex(w1, w2);
  check_gamma_params(a, b);
  const double log_s = std::log((1.0 - w1) - w2);
  const double l = b - log_s;
  return std::exp(std::log(a) + std::log(a + 1.0) + a * std::log(b) - (a + 2.0) * std::log(l) -
                  std::log1p(-w1) - log_s);
}

double sb_mixed_gamma_marginal(double w1, double a, double b) {
  if (!(w1 > 0.0 && w1 < 1.0)) throw DomainError("w1 must lie in (0, 1)");
  check_gamma_params(a, b);
  const double log_s = std::log1p(-w1);
  return std::exp(std::log(a) + a * std::log(b) - (a + 1.0) * std::log(b - log_s) - log_s);
}

double sb_mixed_gamma_cdf_w1(double x, double a, double b) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("x must lie in [0, 1]");
  check_gamma_params(a, b);
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  return -std::expm1(a * (std::log(b) - std::log(b - std::log1p(-x))));
}

double sb_mixed_density(double w1, double w2, const PriorSpec& prior, const QuadratureOptions& options) {
  check_simplex(w1, w2);
  if (!is_proper(prior)) throw UnsupportedPrior("sb_mixed_density: prior '" + family_name(prior) + "' is improper");
  return integrate_over_prior(
      prior, [&](double alpha) { return alpha > 0.0 ? sb_joint_density(w1, w2, alpha) : 0.0; }, options);
}

// ---------------------------------------------------------------------------

bool in_ranked_region_a(double w1, double w2) { return 2.0 * w2 >= 1.0 - w1; }

double ranked_joint_density_a(double w1, double w2, double alpha) {
  check_region_e(w1, w2);
  require_alpha(alpha);
  if (!in_ranked_region_a(w1, w2)) throw DomainError("ranked_joint_density_a: point outside region A");
  const double s = (1.0 - w1) - w2;
  return std::exp(2.0 * std::log(alpha) + (alpha - 1.0) * std::log(s) - std::log(w1) - std::log(w2));
}

double ranked_joint_density(double w1, double w2, double alpha, const FAlphaCache& cache) {
  check_region_e(w1, w2);
  require_alpha(alpha);
  const double s = (1.0 - w1) - w2;
  const double base =
      std::exp(2.0 * std::log(alpha) + (alpha - 1.0) * std::log(s) - std::log(w1) - std::log(w2));
  if (in_ranked_region_a(w1, w2)) return base;
  return base * cache(alpha, w2 / s);
}

double ranked_mixed_density(double w1, double w2, const PriorSpec& prior, const FAlphaCache& cache,
                            const QuadratureOptions& options) {
  check_region_e(w1, w2);
  if (!is_proper(prior)) {
    throw UnsupportedPrior("ranked_mixed_density: prior '" + family_name(prior) + "' is improper");
  }
  return integrate_over_prior(
      prior, [&](double alpha) { return alpha > 0.0 ? ranked_joint_density(w1, w2, alpha, cache) : 0.0; },
      options);
}

// ---------------------------------------------------------------------------

RegimeReport regime_derivative_signs(double alpha) {
  require_alpha(alpha);
  RegimeReport r;
  r.alpha = alpha;
  if (alpha < 1.0) {
    r.sb_w1 = "increasing";
    r.sb_w2 = "increasing";
  } else if (alpha == 1.0) {
    r.sb_w1 = "increasing";
    r.sb_w2 = "constant";
  } else if (alpha < 2.0) {
    r.sb_w1 = "concave";
    r.sb_w2 = "decreasing";
  } else {
    r.sb_w1 = "decreasing";
    r.sb_w2 = "decreasing";
  }
  if (alpha < 1.0) {
    r.ranked_w1 = "convex";
    r.ranked_w2 = "convex";
  } else {
    r.ranked_w1 = "decreasing";
    r.ranked_w2 = "decreasing";
  }
  if (alpha != 1.0 && alpha < 2.0) r.stationary_coefficient = 1.0 / (2.0 - alpha);
  return r;
}

std::pair<double, double> sb_density_gradient(double w1, double w2, double alpha) {
  check_simplex(w1, w2);
  require_alpha(alpha);
  const double s = (1.0 - w1) - w2;
  const double common = alpha * alpha * std::pow(s, alpha - 2.0);
  return {common / ((1.0 - w1) * (1.0 - w1)) * ((2.0 - alpha) * (1.0 - w1) - w2),
          common * (1.0 - alpha) / (1.0 - w1)};
}

std::pair<double, double> ranked_a_density_gradient(double w1, double w2, double alpha) {
  check_region_e(w1, w2);
  require_alpha(alpha);
  const double s = (1.0 - w1) - w2;
  const double common = alpha * alpha * std::pow(s, alpha - 2.0) / (w1 * w2);
  return {common / w1 * ((2.0 - alpha) * w1 + w2 - 1.0), common / w2 * ((2.0 - alpha) * w2 + w1 - 1.0)};
}

double sb_maximizer_w1(double alpha, double w2) {
  if (!(alpha > 1.0 && alpha < 2.0)) throw DomainError("sb_maximizer_w1: needs 1 < alpha < 2");
  return 1.0 - w2 / (2.0 - alpha);
}

double ranked_minimizer(double alpha, double other) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("ranked_minimizer: needs 0 < alpha < 1");
  return (1.0 - other) / (2.0 - alpha);
}

}  // namespace dpprior
