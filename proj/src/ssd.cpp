#include "dpprior/ssd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "dpprior/errors.hpp"
#include "solvers.hpp"

namespace dpprior {

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw InvalidArgument("kl_divergence: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    acc += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(acc, 0.0);
}

std::vector<double> uniform_target(int n) {
  if (n < 1) throw InvalidArgument("uniform_target: n must be >= 1");
  return std::vector<double>(static_cast<std::size_t>(n), 1.0 / n);
}

namespace {

void check_target(int n, std::span<const double> target) {
  if (static_cast<int>(target.size()) != n) {
    throw InvalidArgument("DORO target must have n = " + std::to_string(n) + " entries");
  }
  double sum = 0.0;
  for (double t : target) {
    if (!(t > 0.0)) throw InvalidArgument("DORO target must be strictly positive on 1..n");
    sum += t;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InvalidArgument("DORO target must sum to 1");
}

}  // namespace

double doro_objective(int n, std::span<const double> target, double a, double b,
                      const StirlingTable& table, const DoroOptions& options) {
  const KnPmf pmf = kn_pmf_mixed(n, GammaPrior{a, b}, table, options.quadrature);
  return options.direction == KlDirection::TargetToInduced ? kl_divergence(target, pmf.probs)
                                                           : kl_divergence(pmf.probs, target);
}

DoroFit doro_fit(int n, std::span<const double> target, const StirlingTable& table,
                 const DoroOptions& options) {
  if (n < 2) throw InvalidArgument("doro_fit: n must be >= 2");
  if (n > table.n_max()) throw InvalidArgument("doro_fit: n exceeds the Stirling table");
  check_target(n, target);

  auto objective = [&](std::span<const double> x) {
    return doro_objective(n, target, std::exp(x[0]), std::exp(x[1]), table, options);
  };
  const std::vector<double> step{0.5, 0.5};

  detail::SimplexResult best;
  best.value = std::numeric_limits<double>::infinity();
  int iterations = 0;
  for (double la : {std::log(0.3), 0.0, std::log(3.0)}) {
    for (double lb : {std::log(0.01), std::log(0.1), 0.0}) {
      auto r = detail::nelder_mead(objective, {la, lb}, step, options.size_tol, options.max_iter);
      iterations += r.iterations;
      if (r.value < best.value) best = std::move(r);
    }
  }
  // A fresh simplex around the winner guards against a collapsed one.
  auto polished = detail::nelder_mead(objective, best.x, {0.05, 0.05}, options.size_tol,
                                      options.max_iter);
  iterations += polished.iterations;
  if (polished.value <= best.value) best = std::move(polished);
  if (!best.converged || !std::isfinite(best.value)) {
    throw ConvergenceError("doro_fit: simplex search did not converge",
                           {std::exp(best.x[0]), std::exp(best.x[1])});
  }

  DoroFit fit;
  fit.n = n;
  fit.a = std::exp(best.x[0]);
  fit.b = std::exp(best.x[1]);
  fit.kl = doro_objective(n, target, fit.a, fit.b, table, options);
  fit.target.assign(target.begin(), target.end());
  fit.direction = options.direction;
  fit.iterations = iterations;
  return fit;
}

int scal_cutoff(int n, double c0) {
  if (n < 1) throw InvalidArgument("scal_cutoff: n must be >= 1");
  if (!(c0 > 0.0) || !std::isfinite(c0)) throw InvalidArgument("scal_cutoff: c0 must be > 0");
  return static_cast<int>(std::ceil(c0 * std::log(static_cast<double>(n))));
}

std::pair<double, double> scal_probabilities(int n, int c, double a, double b,
                                             const StirlingTable& table) {
  const KnPmf pmf = kn_pmf_mixed(n, GammaPrior{a, b}, table);
  double tail = 0.0;
  for (int k = c; k <= n; ++k) tail += pmf.at(k);
  return {pmf.at(1), tail};
}

ScalFit scal_fit(int n, double p1_target, double tail_target, double c0,
                 const StirlingTable& table) {
  if (n < 3) throw InvalidArgument("scal_fit: n must be >= 3");
  if (n > table.n_max()) throw InvalidArgument("scal_fit: n exceeds the Stirling table");
  const int c = scal_cutoff(n, c0);
  if (c < 2 || c > n) {
    throw InvalidArgument("scal_fit: cutoff c = " + std::to_string(c) + " outside [2, " +
                          std::to_string(n) + "]");
  }
  for (double t : {p1_target, tail_target}) {
    if (!(t > 0.0 && t < 1.0)) throw InvalidArgument("scal_fit: targets must lie in (0, 1)");
  }
  // {Kₙ = 1} and {Kₙ ≥ c} are disjoint, and with c = 2 they exhaust 1..n.
  if (c == 2 ? std::abs(p1_target + tail_target - 1.0) > 1e-12 : p1_target + tail_target >= 1.0) {
    throw InfeasibleTargets("scal_fit: p(Kn=1) + p(Kn>=c) must be < 1 (c = " + std::to_string(c) +
                            ")");
  }

  ScalFit fit;
  fit.n = n;
  fit.c = c;
  fit.c0 = c0;
  fit.p1_target = p1_target;
  fit.tail_target = tail_target;

  auto residual = [&](std::span<const double> x) {
    const auto [p1, tail] = scal_probabilities(n, c, std::exp(x[0]), std::exp(x[1]), table);
    return std::vector<double>{p1 - p1_target, tail - tail_target};
  };
  constexpr double tol = 1e-9;
  auto newton = detail::damped_newton(residual, {0.0, 0.0}, tol);
  if (newton.converged) {
    fit.a = std::exp(newton.x[0]);
    fit.b = std::exp(newton.x[1]);
    fit.iterations = newton.iterations;
    fit.method = "newton";
  } else {
    // p(Kₙ = 1) increases in b for fixed a, so an inner solve pins b(a);
    // the tail residual along that curve is then bisected in a.
    int evaluations = 0;
    auto solve_b = [&](double la) {
      auto g = [&](double lb) {
        ++evaluations;
        return scal_probabilities(n, c, std::exp(la), std::exp(lb), table).first - p1_target;
      };
      double lo = -10.0, hi = 10.0;
      while (g(lo) > 0.0 && lo > -60.0) lo -= 10.0;
      while (g(hi) < 0.0 && hi < 60.0) hi += 10.0;
      boost::uintmax_t it = 200;
      auto r = boost::math::tools::toms748_solve(g, lo, hi,
                                                 boost::math::tools::eps_tolerance<double>(40), it);
      return 0.5 * (r.first + r.second);
    };
    auto outer = [&](double la) {
      return scal_probabilities(n, c, std::exp(la), std::exp(solve_b(la)), table).second -
             tail_target;
    };
    const double lo = std::log(1e-3), hi = std::log(1e2);
    const double f_lo = outer(lo), f_hi = outer(hi);
    if (!(f_lo * f_hi < 0.0)) {
      throw InfeasibleTargets("scal_fit: no (a, b) attains p(Kn>=" + std::to_string(c) +
                              ") = " + std::to_string(tail_target) + " together with p(Kn=1)");
    }
    boost::uintmax_t it = 200;
    auto r = boost::math::tools::toms748_solve(outer, lo, hi, f_lo, f_hi,
                                               boost::math::tools::eps_tolerance<double>(40), it);
    const double la = 0.5 * (r.first + r.second);
    fit.a = std::exp(la);
    fit.b = std::exp(solve_b(la));
    fit.iterations = evaluations;
    fit.method = "bisection";
  }
  std::tie(fit.p1, fit.tail) = scal_probabilities(n, c, fit.a, fit.b, table);
  if (std::abs(fit.p1 - p1_target) > 1e-6 || std::abs(fit.tail - tail_target) > 1e-6) {
    throw ConvergenceError("scal_fit: residuals above 1e-6", {fit.a, fit.b});
  }
  return fit;
}

std::pair<double, double> scal_approx(int n) {
  if (n < 0) throw InvalidArgument("scal_approx: n must be >= 0");
  const double v = std::exp(-0.033 * n);
  return {v, v};
}

DiffuseSummary diffuse_summary(int n, double a, double b, const StirlingTable& table,
                               double coverage) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError("diffuse_summary: a and b must be finite and positive");
  }
  if (!(coverage > 0.0 && coverage < 1.0)) {
    throw InvalidArgument("diffuse_summary: coverage must lie in (0, 1)");
  }
  const double lo_level = 0.5 * (1.0 - coverage);
  const double hi_level = 0.5 * (1.0 + coverage);
  const KnPmf pmf = kn_pmf_mixed(n, GammaPrior{a, b}, table);
  DiffuseSummary s;
  s.n = n;
  s.coverage = coverage;
  s.mode = static_cast<int>(std::max_element(pmf.probs.begin(), pmf.probs.end()) - pmf.probs.begin()) + 1;
  double cum = 0.0;
  bool have_lower = false;
  for (int k = 1; k <= n; ++k) {
    cum += pmf.at(k);
    if (!have_lower && cum >= lo_level) {
      s.lower = k;
      have_lower = true;
    }
    if (cum >= hi_level) {
      s.upper = k;
      break;
    }
  }
  s.mean = pmf.mean();
  s.entropy = 0.0;
  for (double p : pmf.probs) {
    if (p > 0.0) s.entropy -= p * std::log(p);
  }
  s.kl_to_uniform = std::max(0.0, std::log(static_cast<double>(n)) - s.entropy);
  return s;
}

nlohmann::json to_json(const DoroFit& fit) {
  return {{"n", fit.n},
          {"a", fit.a},
          {"b", fit.b},
          {"objective", fit.kl},
          {"targets",
           {{"pmf", fit.target},
            {"kl_direction", fit.direction == KlDirection::TargetToInduced ? "target_to_induced"
                                                                           : "induced_to_target"}}},
          {"solver_iters", fit.iterations}};
}

nlohmann::json to_json(const ScalFit& fit) {
  return {{"n", fit.n},
          {"a", fit.a},
          {"b", fit.b},
          {"objective", std::max(std::abs(fit.p1 - fit.p1_target), std::abs(fit.tail - fit.tail_target))},
          {"targets", {{"p1", fit.p1_target}, {"tail", fit.tail_target}, {"c", fit.c}, {"c0", fit.c0}}},
          {"achieved", {{"p1", fit.p1}, {"tail", fit.tail}}},
          {"method", fit.method},
          {"solver_iters", fit.iterations}};
}

nlohmann::json to_json(const DiffuseSummary& s) {
  return {{"n", s.n},          {"mode", s.mode},       {"coverage", s.coverage}, {"lower", s.lower},
          {"upper", s.upper},  {"mean", s.mean},       {"entropy", s.entropy},
          {"kl_to_uniform", s.kl_to_uniform}};
}

}  // namespace dpprior
