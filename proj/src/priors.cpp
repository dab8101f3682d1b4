#include "dpprior/priors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "dpprior/errors.hpp"

namespace dpprior {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Σᵢ (i-1)/(α+i-1)², i.e. α·I(α). Finite at α = 0 (equals H_{n-1}).
double jeffreys_scaled_information(int n, double alpha) {
  if (n < 2) return 0.0;
  // The ψ form subtracts O(n/α) terms to get an O(n²/α²) result; past
  // α ≈ 64 n that loses more digits than the direct sum.
  if (alpha <= 64.0 * n) {
    const double value = digamma(alpha + n) - digamma(alpha + 1.0) +
                         alpha * (trigamma(alpha + n) - trigamma(alpha + 1.0));
    return std::max(value, 0.0);
  }
  double acc = 0.0;
  for (int i = 2; i <= n; ++i) {
    const double d = alpha + i - 1.0;
    acc += (i - 1.0) / (d * d);
  }
  return acc;
}

void require_jeffreys_n(int n) {
  if (n < 2) {
    throw UnsupportedPrior("Jeffreys prior carries no mass for n < 2 (n = " +
                           std::to_string(n) + ")");
  }
}

// How a prior is integrated. Below α = 1 the coordinate is t = α^lower
// (lower = exponent of the density's power-law behaviour at 0), which turns a
// density ~ α^{lower-1} into a bounded weight. Above α = 1 the coordinate is
// s = α^{-tail}, which does the same for a density ~ α^{-1-tail}.
struct Measure {
  double lower = 1.0;
  double tail = 1.0;
  // log p(α) + (1 - lower) log α, finite at α = 0 for proper priors.
  std::function<double(double)> log_lower_weight;
  // log p(α)
  std::function<double(double)> log_density;
};

Measure make_measure(const PriorSpec& prior, bool normalized) {
  Measure m;
  std::visit(
      Overloaded{
          [&](const GammaPrior& g) {
            const double a = g.shape;
            const double b = g.rate;
            const double log_norm = a * std::log(b) - log_gamma(a);
            m.lower = a;
            m.log_lower_weight = [=](double x) { return log_norm - b * x; };
            m.log_density = [=](double x) {
              return log_norm + (a - 1.0) * std::log(x) - b * x;
            };
          },
          [&](const ExponentialPrior& e) {
            const double r = e.rate;
            m.log_lower_weight = [=](double x) { return std::log(r) - r * x; };
            m.log_density = m.log_lower_weight;
          },
          [&](const LognormalPrior& l) {
            const double mu = l.meanlog;
            const double sd = l.sdlog;
            auto f = [=](double x) {
              if (x <= 0.0) return -kInf;
              const double z = (std::log(x) - mu) / sd;
              return -std::log(x) - std::log(sd) - 0.5 * std::log(2.0 * kPi) - 0.5 * z * z;
            };
            m.log_lower_weight = f;
            m.log_density = f;
          },
          [&](const HalfCauchyPrior& h) {
            const double s = h.scale;
            auto f = [=](double x) {
              const double r = x / s;
              return std::log(2.0 / (kPi * s)) - std::log1p(r * r);
            };
            m.log_lower_weight = f;
            m.log_density = f;
          },
          [&](const JeffreysPrior& j) {
            require_jeffreys_n(j.n);
            const int n = j.n;
            const double log_z = normalized ? std::log(jeffreys_normalizer(n)) : 0.0;
            m.lower = 0.5;
            m.tail = 0.5;
            m.log_lower_weight = [=](double x) {
              return 0.5 * std::log(jeffreys_scaled_information(n, x)) - log_z;
            };
            m.log_density = [=](double x) {
              return 0.5 * (std::log(jeffreys_scaled_information(n, x)) - std::log(x)) - log_z;
            };
          },
          [&](const ImproperReciprocalPrior&) {
            m.log_lower_weight = [](double x) { return -std::log(x); };
            m.log_density = m.log_lower_weight;
          },
          [&](const ImproperFlatPrior&) {
            m.log_lower_weight = [](double) { return 0.0; };
            m.log_density = m.log_lower_weight;
          },
      },
      prior);
  return m;
}

// ∫_lo^hi f(α) p(α) dα with 0 <= lo < hi <= ∞, split at α = 1.
QuadratureResult integrate_measure(const Measure& m, const VectorIntegrand& f,
                                   std::size_t dim, double lo, double hi,
                                   const QuadratureOptions& options) {
  QuadratureResult total;
  total.values.assign(dim, 0.0);
  total.converged = true;
  std::vector<double> buffer(dim);

  auto accumulate = [&](const QuadratureResult& r) {
    for (std::size_t j = 0; j < dim; ++j) total.values[j] += r.values[j];
    total.error_estimate += r.error_estimate;
    total.panels += r.panels;
    total.converged = total.converged && r.converged;
  };

  if (lo < 1.0) {
    const double t_lo = lo > 0.0 ? std::pow(lo, m.lower) : 0.0;
    const double t_hi = std::pow(std::min(hi, 1.0), m.lower);
    const double inv_lower = 1.0 / m.lower;
    const double log_jac = -std::log(m.lower);
    auto g = [&](double t, std::span<double> out) {
      const double alpha = std::pow(t, inv_lower);
      const double w = std::exp(m.log_lower_weight(alpha) + log_jac);
      if (!(w > 0.0) || !std::isfinite(w)) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
      }
      f(alpha, out);
      for (double& v : out) v *= w;
    };
    if (t_hi > t_lo) accumulate(integrate_adaptive(g, dim, t_lo, t_hi, options));
  }
  if (hi > 1.0) {
    const double s_lo = std::isinf(hi) ? 0.0 : std::pow(hi, -m.tail);
    const double s_hi = std::pow(std::max(lo, 1.0), -m.tail);
    const double inv_tail = 1.0 / m.tail;
    const double log_jac = -std::log(m.tail);
    auto g = [&](double s, std::span<double> out) {
      const double alpha = std::pow(s, -inv_tail);
      if (!std::isfinite(alpha)) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
      }
      const double w =
          std::exp(m.log_density(alpha) + (1.0 + m.tail) * std::log(alpha) + log_jac);
      if (!(w > 0.0) || !std::isfinite(w)) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
      }
      f(alpha, out);
      for (double& v : out) v *= w;
    };
    if (s_hi > s_lo) accumulate(integrate_adaptive(g, dim, s_lo, s_hi, options));
  }
  return total;
}

double integrate_measure_scalar(const Measure& m, const std::function<double(double)>& f,
                                double lo, double hi, const QuadratureOptions& options) {
  auto r = integrate_measure(
      m, [&](double x, std::span<double> out) { out[0] = f(x); }, 1, lo, hi, options);
  return r.values[0];
}

void require_proper(const PriorSpec& prior, const char* what) {
  if (!is_proper(prior)) {
    throw UnsupportedPrior(std::string(what) + ": prior '" + family_name(prior) +
                           "' is improper");
  }
}

void require_positive_alpha(double alpha) {
  if (!(alpha > 0.0)) throw DomainError("alpha must be > 0");
}

double numeric_cdf(const PriorSpec& prior, double x) {
  const Measure m = make_measure(prior, true);
  QuadratureOptions opts;
  opts.rel_tol = 1e-13;
  auto one = [](double) { return 1.0; };
  if (x <= 1.0) return std::clamp(integrate_measure_scalar(m, one, 0.0, x, opts), 0.0, 1.0);
  return std::clamp(1.0 - integrate_measure_scalar(m, one, x, kInf, opts), 0.0, 1.0);
}

double numeric_quantile(const PriorSpec& prior, double q) {
  // Root-find in log α; expand the bracket until it straddles q.
  auto f = [&](double log_x) { return cdf(prior, std::exp(log_x)) - q; };
  double lo = -1.0;
  double hi = 1.0;
  while (f(lo) > 0.0) {
    lo *= 2.0;
    if (lo < -1500.0) return 0.0;
  }
  while (f(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1500.0) return kInf;
  }
  std::uintmax_t iters = 200;
  auto r = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(52),
                                             iters);
  return std::exp(0.5 * (r.first + r.second));
}

}  // namespace

std::string family_name(const PriorSpec& prior) {
  return std::visit(Overloaded{
                        [](const GammaPrior&) { return std::string("gamma"); },
                        [](const ExponentialPrior&) { return std::string("exponential"); },
                        [](const LognormalPrior&) { return std::string("lognormal"); },
                        [](const HalfCauchyPrior&) { return std::string("half_cauchy"); },
                        [](const JeffreysPrior&) { return std::string("jeffreys"); },
                        [](const ImproperReciprocalPrior&) {
                          return std::string("improper_reciprocal");
                        },
                        [](const ImproperFlatPrior&) { return std::string("improper_flat"); },
                    },
                    prior);
}

bool is_proper(const PriorSpec& prior) {
  return !std::holds_alternative<ImproperReciprocalPrior>(prior) &&
         !std::holds_alternative<ImproperFlatPrior>(prior);
}

void validate(const PriorSpec& prior) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidArgument(std::string(name) + " must be a finite positive number");
    }
  };
  std::visit(Overloaded{
                 [&](const GammaPrior& g) {
                   positive(g.shape, "gamma shape");
                   positive(g.rate, "gamma rate");
                 },
                 [&](const ExponentialPrior& e) { positive(e.rate, "exponential rate"); },
                 [&](const LognormalPrior& l) {
                   if (!std::isfinite(l.meanlog)) {
                     throw InvalidArgument("lognormal meanlog must be finite");
                   }
                   positive(l.sdlog, "lognormal sdlog");
                 },
                 [&](const HalfCauchyPrior& h) { positive(h.scale, "half-Cauchy scale"); },
                 [&](const JeffreysPrior& j) {
                   if (j.n < 1) throw InvalidArgument("Jeffreys n must be >= 1");
                 },
                 [](const ImproperReciprocalPrior&) {},
                 [](const ImproperFlatPrior&) {},
             },
             prior);
}

double jeffreys_fisher_root(int n, double alpha) {
  if (n < 1) throw InvalidArgument("jeffreys_fisher_root: n must be >= 1");
  require_positive_alpha(alpha);
  if (n == 1) return 0.0;
  return std::sqrt(jeffreys_scaled_information(n, alpha) / alpha);
}

double jeffreys_fisher_root_sum(int n, double alpha) {
  if (n < 1) throw InvalidArgument("jeffreys_fisher_root_sum: n must be >= 1");
  require_positive_alpha(alpha);
  double acc = 0.0;
  for (int i = 2; i <= n; ++i) {
    const double d = alpha + i - 1.0;
    acc += (i - 1.0) / (d * d);
  }
  return std::sqrt(acc / alpha);
}

double jeffreys_normalizer(int n) {
  require_jeffreys_n(n);
  static std::mutex mutex;
  static std::map<int, double> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(n); it != cache.end()) return it->second;
  }
  const Measure m = make_measure(JeffreysPrior{n}, false);
  QuadratureOptions opts;
  opts.rel_tol = 1e-14;
  const double z = integrate_measure_scalar(m, [](double) { return 1.0; }, 0.0, kInf, opts);
  std::lock_guard lock(mutex);
  cache.emplace(n, z);
  return z;
}

double jeffreys2_cdf_closed_form(double x) {
  if (!(x >= 0.0)) throw DomainError("jeffreys2_cdf_closed_form: x must be >= 0");
  return 2.0 / kPi * std::atan(std::sqrt(x));
}

double jeffreys2_density_closed_form(double alpha) {
  require_positive_alpha(alpha);
  return 1.0 / (kPi * (alpha + 1.0) * std::sqrt(alpha));
}

double log_density(const PriorSpec& prior, double alpha) {
  require_positive_alpha(alpha);
  return make_measure(prior, false).log_density(alpha);
}

double log_density_normalized(const PriorSpec& prior, double alpha) {
  require_positive_alpha(alpha);
  require_proper(prior, "log_density_normalized");
  return make_measure(prior, true).log_density(alpha);
}

double cdf(const PriorSpec& prior, double x) {
  require_proper(prior, "cdf");
  if (!(x >= 0.0)) throw DomainError("cdf: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return std::visit(
      Overloaded{
          [&](const GammaPrior& g) { return reg_lower_incomplete_gamma(g.shape, g.rate * x); },
          [&](const ExponentialPrior& e) { return -std::expm1(-e.rate * x); },
          [&](const LognormalPrior& l) {
            return 0.5 * std::erfc(-(std::log(x) - l.meanlog) / (l.sdlog * std::numbers::sqrt2));
          },
          [&](const HalfCauchyPrior& h) { return 2.0 / kPi * std::atan(x / h.scale); },
          [&](const JeffreysPrior& j) {
            require_jeffreys_n(j.n);
            return numeric_cdf(prior, x);
          },
          [&](const auto&) -> double { throw UnsupportedPrior("cdf: improper prior"); },
      },
      prior);
}

double quantile(const PriorSpec& prior, double q) {
  require_proper(prior, "quantile");
  if (!(q > 0.0 && q < 1.0)) throw DomainError("quantile: q must lie in (0, 1)");
  return std::visit(
      Overloaded{
          [&](const ExponentialPrior& e) { return -std::log1p(-q) / e.rate; },
          [&](const HalfCauchyPrior& h) { return h.scale * std::tan(kPi * q / 2.0); },
          [&](const JeffreysPrior& j) {
            require_jeffreys_n(j.n);
            return numeric_quantile(prior, q);
          },
          [&](const auto&) { return numeric_quantile(prior, q); },
      },
      prior);
}

QuadratureResult integrate_over_prior(const PriorSpec& prior, const VectorIntegrand& f,
                                      std::size_t dimension, const QuadratureOptions& options) {
  require_proper(prior, "integrate_over_prior");
  return integrate_measure(make_measure(prior, true), f, dimension, 0.0, kInf, options);
}

double integrate_over_prior(const PriorSpec& prior, const std::function<double(double)>& f,
                            const QuadratureOptions& options) {
  require_proper(prior, "integrate_over_prior");
  return integrate_measure_scalar(make_measure(prior, true), f, 0.0, kInf, options);
}

double integrate_prior_kernel(const PriorSpec& prior, const std::function<double(double)>& f,
                              double lo, double hi, const QuadratureOptions& options) {
  if (!(lo >= 0.0 && hi > lo)) throw InvalidArgument("integrate_prior_kernel: need 0 <= lo < hi");
  return integrate_measure_scalar(make_measure(prior, false), f, lo, hi, options);
}

ProprietyReport propriety_diagnostic(const PriorSpec& prior, int n, int k) {
  if (n < 1 || k < 1 || k > n) throw InvalidArgument("propriety_diagnostic: need 1 <= k <= n");
  const Measure m = make_measure(prior, false);
  auto log_kernel = [&](double alpha) {
    return (k - 1.0) * std::log(alpha) - log_rising_ratio(alpha, n) + m.log_density(alpha);
  };
  auto slope = [&](double a1, double a2) {
    return (log_kernel(a2) - log_kernel(a1)) / (std::log(a2) - std::log(a1));
  };
  // Integrable near 0 iff the kernel behaves like α^p with p > -1, near ∞
  // iff p < -1. The margin keeps borderline exponents (p = -1 plus a
  // vanishing correction) on the divergent side.
  constexpr double margin = 1e-3;
  ProprietyReport report{};
  report.slope_at_zero = slope(1e-12, 1e-10);
  report.slope_at_infinity = slope(1e10, 1e12);
  report.integrable_at_zero = report.slope_at_zero > -1.0 + margin;
  report.integrable_at_infinity = report.slope_at_infinity < -1.0 - margin;
  return report;
}

nlohmann::json to_json(const PriorSpec& prior) {
  nlohmann::json j;
  j["family"] = family_name(prior);
  std::visit(Overloaded{
                 [&](const GammaPrior& g) {
                   j["params"] = {{"shape", g.shape}, {"rate", g.rate}};
                 },
                 [&](const ExponentialPrior& e) { j["params"] = {{"rate", e.rate}}; },
                 [&](const LognormalPrior& l) {
                   j["params"] = {{"meanlog", l.meanlog}, {"sdlog", l.sdlog}};
                 },
                 [&](const HalfCauchyPrior& h) {
                   j["params"] = {{"location", 0.0}, {"scale", h.scale}};
                 },
                 [&](const JeffreysPrior& p) { j["params"] = {{"n", p.n}}; },
                 [&](const auto&) { j["params"] = nlohmann::json::object(); },
             },
             prior);
  return j;
}

PriorSpec prior_from_json(const nlohmann::json& j, int default_n) {
  std::string family;
  nlohmann::json params = nlohmann::json::object();
  if (j.is_string()) {
    family = j.get<std::string>();
  } else if (j.is_object()) {
    if (!j.contains("family") || !j["family"].is_string()) {
      throw InvalidArgument("prior JSON needs a string 'family'");
    }
    family = j["family"].get<std::string>();
    for (const auto& [key, _] : j.items()) {
      if (key != "family" && key != "params") {
        throw InvalidArgument("prior JSON: unknown key '" + key + "'");
      }
    }
    if (j.contains("params")) params = j["params"];
  } else {
    throw InvalidArgument("prior JSON must be an object or a family name");
  }

  auto get = [&](const char* name, std::size_t index) -> double {
    if (params.is_array()) {
      if (index >= params.size() || !params[index].is_number()) {
        throw InvalidArgument(family + ": missing parameter '" + name + "'");
      }
      return params[index].get<double>();
    }
    if (!params.is_object() || !params.contains(name) || !params[name].is_number()) {
      throw InvalidArgument(family + ": missing parameter '" + name + "'");
    }
    return params[name].get<double>();
  };
  auto expect_keys = [&](std::initializer_list<const char*> keys) {
    if (params.is_array()) {
      if (params.size() != keys.size()) {
        throw InvalidArgument(family + ": expected " + std::to_string(keys.size()) +
                              " parameters");
      }
      return;
    }
    for (const auto& [key, _] : params.items()) {
      if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; })) {
        throw InvalidArgument(family + ": unknown parameter '" + key + "'");
      }
    }
  };

  PriorSpec prior;
  if (family == "gamma") {
    expect_keys({"shape", "rate"});
    prior = GammaPrior{get("shape", 0), get("rate", 1)};
  } else if (family == "exponential") {
    expect_keys({"rate"});
    prior = ExponentialPrior{get("rate", 0)};
  } else if (family == "lognormal") {
    expect_keys({"meanlog", "sdlog"});
    prior = LognormalPrior{get("meanlog", 0), get("sdlog", 1)};
  } else if (family == "half_cauchy") {
    if (params.is_object() && params.contains("location")) {
      expect_keys({"location", "scale"});
      if (get("location", 0) != 0.0) {
        throw InvalidArgument("half_cauchy: location is fixed at 0");
      }
      prior = HalfCauchyPrior{get("scale", 1)};
    } else {
      expect_keys({"scale"});
      prior = HalfCauchyPrior{get("scale", 0)};
    }
  } else if (family == "jeffreys") {
    expect_keys({"n"});
    const bool has_n = params.is_array() ? !params.empty() : params.contains("n");
    const double n = has_n ? get("n", 0) : default_n;
    if (n != std::floor(n)) throw InvalidArgument("jeffreys: n must be an integer");
    prior = JeffreysPrior{static_cast<int>(n)};
  } else if (family == "improper_reciprocal") {
    expect_keys({});
    prior = ImproperReciprocalPrior{};
  } else if (family == "improper_flat") {
    expect_keys({});
    prior = ImproperFlatPrior{};
  } else {
    throw InvalidArgument("unknown prior family '" + family + "'");
  }
  validate(prior);
  return prior;
}

}  // namespace dpprior
