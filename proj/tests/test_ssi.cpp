#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "dpprior/errors.hpp"
#include "dpprior/ssi.hpp"

using namespace dpprior;
using doctest::Approx;

namespace {

const FAlphaCache& cache() {
  static const FAlphaCache c;
  return c;
}

ElicitationProblem problem(ElicitFamily f, std::vector<double> t, std::vector<double> p) {
  return {f, std::move(t), std::move(p)};
}

// ∫₀^∞ f by the tan substitution, independent of the prior machinery.
double integrate_half_line(const std::function<double(double)>& f) {
  QuadratureOptions opts;
  opts.rel_tol = 1e-12;
  opts.max_panels = 100000;
  return integrate_adaptive(
             [&](double u) {
               if (u >= std::numbers::pi / 2) return 0.0;
               const double c = std::cos(u);
               const double x = std::tan(u);
               return x > 0.0 ? f(x) / (c * c) : 0.0;
             },
             0.0, std::numbers::pi / 2, opts)
      .values[0];
}

double gamma_pdf(double x, double a, double b) {
  return std::exp(a * std::log(b) - std::lgamma(a) + (a - 1) * std::log(x) - b * x);
}

enum class Shape { Increasing, Decreasing, Constant, Max, Min, Other };

// Classifies a sampled 1-d profile by the sign pattern of its differences.
Shape classify(const std::vector<double>& y, std::size_t* turn = nullptr) {
  std::vector<int> signs;
  double scale = 0.0;
  for (double v : y) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 1; i < y.size(); ++i) {
    const double d = y[i] - y[i - 1];
    signs.push_back(std::abs(d) <= 1e-12 * scale ? 0 : (d > 0 ? 1 : -1));
  }
  if (std::all_of(signs.begin(), signs.end(), [](int s) { return s == 0; })) return Shape::Constant;
  if (std::all_of(signs.begin(), signs.end(), [](int s) { return s > 0; })) return Shape::Increasing;
  if (std::all_of(signs.begin(), signs.end(), [](int s) { return s < 0; })) return Shape::Decreasing;
  std::size_t changes = 0, at = 0;
  for (std::size_t i = 1; i < signs.size(); ++i) {
    if (signs[i] != signs[i - 1]) {
      ++changes;
      at = i;
    }
  }
  if (turn) *turn = at;
  if (changes == 1 && signs.front() > 0 && signs.back() < 0) return Shape::Max;
  if (changes == 1 && signs.front() < 0 && signs.back() > 0) return Shape::Min;
  return Shape::Other;
}

Shape expected_shape(const std::string& label) {
  if (label == "increasing") return Shape::Increasing;
  if (label == "decreasing") return Shape::Decreasing;
  if (label == "constant") return Shape::Constant;
  if (label == "concave") return Shape::Max;
  if (label == "convex") return Shape::Min;
  return Shape::Other;
}

}  // namespace

TEST_CASE("elicitation reproduces the reference fits") {
  const double third = 1.0 / 3.0;
  auto g1 = elicit(problem(ElicitFamily::Gamma, {1, 2}, {third, third, third}));
  CHECK(std::abs(g1.eta[0] - 1.814) <= 0.005);
  CHECK(std::abs(g1.eta[1] - 1.036) <= 0.005);

  auto g2 = elicit(problem(ElicitFamily::Gamma, {1, 2}, {0.5, 0.25, 0.25}));
  CHECK(std::abs(g2.eta[0] - 1.000) <= 0.005);
  CHECK(std::abs(g2.eta[1] - 0.693) <= 0.005);
  // Shape 1 makes this row an exponential: both solves coincide.
  CHECK(g2.eta[0] == Approx(1.0).epsilon(1e-8));
  CHECK(g2.eta[1] == Approx(elicit_exponential_closed_form(1, 0.5)).epsilon(1e-8));
  CHECK(elicit_exponential_closed_form(1, 0.5) == Approx(std::log(2.0)));

  auto l1 = elicit(problem(ElicitFamily::Lognormal, {1, 2}, {third, third, third}));
  CHECK(std::abs(l1.eta[0] - 0.347) <= 0.005);
  CHECK(std::abs(l1.eta[1] - 0.805) <= 0.005);
  CHECK(l1.eta[0] == Approx(std::log(2.0) / 2).epsilon(1e-9));

  auto l2 = elicit(problem(ElicitFamily::Lognormal, {1, 2}, {0.5, 0.25, 0.25}));
  CHECK(std::abs(l2.eta[0] - 0.000) <= 0.005);
  CHECK(std::abs(l2.eta[1] - 1.028) <= 0.005);

  for (const auto* r : {&l1, &l2}) {
    const auto& t = r == &l1 ? std::vector<double>{third, 2 * third} : std::vector<double>{0.5, 0.75};
    const auto closed = elicit_lognormal_closed_form(1, 2, t[0], t[1]);
    CHECK(std::abs(r->eta[0] - closed[0]) < 1e-9);
    CHECK(std::abs(r->eta[1] - closed[1]) < 1e-9);
  }

  auto hc = elicit(problem(ElicitFamily::HalfCauchy, {1}, {0.5, 0.5}));
  CHECK(hc.eta[0] == Approx(1.0).epsilon(1e-10));
  CHECK(elicit_half_cauchy_closed_form(1, 0.5) == Approx(1.0));

  for (const auto* r : {&g1, &g2, &l1, &l2, &hc}) {
    for (double res : r->residuals) CHECK(std::abs(res) < 1e-8);
  }
}

TEST_CASE("exponential closed form") {
  CHECK(elicit_exponential_closed_form(1, 1 - std::exp(-1.0)) == Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(elicit_exponential_closed_form(0, 0.5), DomainError);
  CHECK_THROWS_AS(elicit_exponential_closed_form(1, 1.0), DomainError);
  RngStream rng(8);
  for (int i = 0; i < 50; ++i) {
    const double t = std::exp(-2 + 4 * rng.uniform());
    const double p = 0.05 + 0.9 * rng.uniform();
    const auto r = elicit(problem(ElicitFamily::Exponential, {t}, {p, 1 - p}));
    CHECK(std::abs(r.eta[0] - elicit_exponential_closed_form(t, p)) < 1e-10);
  }
}

TEST_CASE("elicitation round trip on random targets") {
  RngStream rng(12);
  for (auto family : {ElicitFamily::Gamma, ElicitFamily::Lognormal}) {
    for (int i = 0; i < 10; ++i) {
      const double t1 = 0.5 + rng.uniform();
      const double t2 = t1 * (1.5 + rng.uniform());
      const double p1 = 0.2 + 0.3 * rng.uniform();
      const double p2 = 0.15 + 0.3 * rng.uniform();
      const auto r = elicit(problem(family, {t1, t2}, {p1, p2, 1 - p1 - p2}));
      for (double res : r.residuals) CHECK(std::abs(res) < 1e-8);
    }
  }
}

TEST_CASE("elicitation feasibility") {
  CHECK_THROWS_AS(elicit(problem(ElicitFamily::Gamma, {1, 2}, {0.3, 0.3, 0.3})), InvalidArgument);
  CHECK_THROWS_AS(elicit(problem(ElicitFamily::Gamma, {2, 1}, {0.3, 0.3, 0.4})), InvalidArgument);
  CHECK_THROWS_AS(elicit(problem(ElicitFamily::Gamma, {1}, {0.5, 0.5})), InvalidArgument);
  CHECK_THROWS_AS(elicit(problem(ElicitFamily::Gamma, {1, 2}, {0.5, 0.5})), InvalidArgument);
  // One free parameter cannot match two independent pieces.
  try {
    elicit(problem(ElicitFamily::HalfCauchy, {1, 2}, {0.5, 0.1, 0.4}));
    FAIL("expected InfeasibleTargets");
  } catch (const InfeasibleTargets& e) {
    CHECK(std::string(e.what()).find("p(1 < alpha <= 2)") != std::string::npos);
  }
  // ...unless the extra piece is the one the fit implies.
  const double implied = 2 / std::numbers::pi * std::atan(2.0) - 0.5;
  CHECK_NOTHROW(elicit(problem(ElicitFamily::HalfCauchy, {1, 2}, {0.5, implied, 0.5 - implied})));
  // A gamma cannot put almost nothing on (1, 2] with mass on both sides.
  CHECK_THROWS_AS(elicit(problem(ElicitFamily::Gamma, {1, 2}, {0.6, 1e-6, 0.4 - 1e-6})), InfeasibleTargets);
}

TEST_CASE("elicitation JSON") {
  const auto p = problem(ElicitFamily::Lognormal, {1, 2}, {0.5, 0.25, 0.25});
  const auto j = to_json(p);
  CHECK(j["family"] == "lognormal");
  const auto back = elicitation_problem_from_json(j);
  CHECK(back.thresholds == p.thresholds);
  CHECK(back.probabilities == p.probabilities);
  CHECK_THROWS_AS(elicitation_problem_from_json(nlohmann::json::parse(R"({"family":"gamma","thresholds":[1],"probabilities":[0.5,0.5],"x":1})")),
                  InvalidArgument);
  CHECK_THROWS_AS(parse_elicit_family("weibull"), InvalidArgument);
  const auto r = to_json(elicit(p));
  CHECK(r["prior"]["family"] == "lognormal");
}

TEST_CASE("size-biased conditional density") {
  CHECK(sb_joint_density(0.5, 0.25, 1.0) == Approx(2.0));
  CHECK(sb_joint_density(0.3, 0.3, 2.0) == Approx(4 * 0.4 / 0.7));
  CHECK_THROWS_AS(sb_joint_density(0.5, 0.5, 1.0), DomainError);
  CHECK_THROWS_AS(sb_joint_density(0.0, 0.5, 1.0), DomainError);
  CHECK_THROWS_AS(sb_joint_density(0.2, 0.5, 0.0), DomainError);

  for (double alpha : {0.5, 1.0, 2.0, 5.0}) {
    QuadratureOptions opts;
    opts.rel_tol = 1e-10;
    const double mass = integrate_adaptive(
                            [&](double w1) {
                              if (!(w1 > 0.0 && w1 < 1.0)) return 0.0;
                              return integrate_adaptive(
                                         [&](double w2) {
                                           return (w2 > 0 && w1 + w2 < 1) ? sb_joint_density(w1, w2, alpha) : 0.0;
                                         },
                                         0.0, 1.0 - w1, opts)
                                  .values[0];
                            },
                            0.0, 1.0, opts)
                            .values[0];
    CAPTURE(alpha);
    CHECK(std::abs(mass - 1.0) < 1e-6);
  }
}

TEST_CASE("size-biased prefix density") {
  const std::vector<double> one{0.3};
  CHECK(sb_joint_density_prefix(one, 1.0) == Approx(1.0));
  const std::vector<double> two{0.3, 0.2};
  CHECK(sb_joint_density_prefix(two, 1.7) == Approx(sb_joint_density(0.3, 0.2, 1.7)));
  // Oracle: product of Beta(1, α) stick densities times the Jacobian of
  // w ↦ v, with v_h = w_h / (1 - w_1 - … - w_{h-1}).
  const std::vector<double> three{0.2, 0.2, 0.2};
  double rest = 1.0, value = 1.0;
  for (double w : three) {
    const double v = w / rest;
    value *= 2.0 * (1 - v) / rest;
    rest -= w;
  }
  CHECK(sb_joint_density_prefix(three, 2.0) == Approx(value));
  CHECK(sb_joint_density_prefix(three, 2.0) == Approx(8 * 0.4 / (0.8 * 0.6)));
  const std::vector<double> bad{0.6, 0.5};
  CHECK_THROWS_AS(sb_joint_density_prefix(bad, 1.0), DomainError);
}

TEST_CASE("gamma-mixed size-biased closed forms") {
  CHECK(sb_mixed_gamma_cdf_w1(0.0, 1, 1) == 0.0);
  CHECK(sb_mixed_gamma_cdf_w1(1.0, 1, 1) == 1.0);
  CHECK(sb_mixed_gamma_cdf_w1(1 - 1e-15, 1.814, 1.036) > 0.9);

  const double oracle = integrate_half_line([](double a) { return sb_joint_density(0.3, 0.2, a) * gamma_pdf(a, 1, 1); });
  CHECK(std::abs(sb_mixed_gamma_density(0.3, 0.2, 1, 1) - oracle) < 1e-6);

  for (auto [a, b] : std::vector<std::pair<double, double>>{{1, 1}, {1.814, 1.036}}) {
    // The marginal has a slowly decaying 1/((1-w) log^{a+1}) tail at w = 1, so
    // partial integrals are checked against the CDF rather than total mass.
    QuadratureOptions opts;
    opts.rel_tol = 1e-12;
    for (double x : {0.3, 0.9, 0.999}) {
      const double part =
          integrate_adaptive([&](double w) { return w > 0 ? sb_mixed_gamma_marginal(w, a, b) : 0.0; }, 0.0, x, opts)
              .values[0];
      CHECK(std::abs(part - sb_mixed_gamma_cdf_w1(x, a, b)) < 1e-8);
    }
    CHECK(sb_mixed_gamma_cdf_w1(1 - 1e-300, a, b) > sb_mixed_gamma_cdf_w1(0.999, a, b));
    // The marginal is the derivative of the CDF.
    const double h = 1e-6;
    CHECK(sb_mixed_gamma_marginal(0.4, a, b) ==
          Approx((sb_mixed_gamma_cdf_w1(0.4 + h, a, b) - sb_mixed_gamma_cdf_w1(0.4 - h, a, b)) / (2 * h)).epsilon(1e-6));
  }
}

TEST_CASE("closed form equals alpha-quadrature on a 20x20 grid") {
  for (auto [a, b] : std::vector<std::pair<double, double>>{{1, 1}, {1.814, 1.036}}) {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      for (int j = 0; j < 20; ++j) {
        const double w1 = (i + 0.5) / 20, w2 = (j + 0.5) / 20;
        if (w1 + w2 >= 1) continue;
        const double q = sb_mixed_density(w1, w2, GammaPrior{a, b});
        worst = std::max(worst, std::abs(q - sb_mixed_gamma_density(w1, w2, a, b)));
      }
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("size-biased mixed density under other priors") {
  const double v = sb_mixed_density(0.4, 0.3, LognormalPrior{0.347, 0.805});
  CHECK(v > 0.0);
  CHECK(std::isfinite(v));
  QuadratureOptions loose;
  loose.rel_tol = 1e-8;
  CHECK(std::abs(v - sb_mixed_density(0.4, 0.3, LognormalPrior{0.347, 0.805}, loose)) < 1e-6);
  CHECK(sb_mixed_density(0.4, 0.3, JeffreysPrior{10}) > 0.0);
  CHECK_THROWS_AS(sb_mixed_density(0.4, 0.3, ImproperReciprocalPrior{}), UnsupportedPrior);
}

TEST_CASE("ranked conditional density") {
  CHECK(in_ranked_region_a(0.6, 0.3));
  CHECK(ranked_joint_density(0.6, 0.3, 1.0, cache()) == Approx(1 / (0.6 * 0.3)));
  CHECK(ranked_joint_density(0.6, 0.3, 2.5, cache()) == ranked_joint_density_a(0.6, 0.3, 2.5));
  CHECK_THROWS_AS(ranked_joint_density(0.3, 0.4, 1.0, cache()), DomainError);
  CHECK_THROWS_AS(ranked_joint_density(0.6, 0.5, 1.0, cache()), DomainError);
  CHECK_THROWS_AS(ranked_joint_density_a(0.6, 0.1, 1.0), DomainError);
  // Outside A the cached F_α enters and lowers the density.
  CHECK(ranked_joint_density(0.6, 0.1, 1.0, cache()) < ranked_joint_density(0.6, 0.1, 1.0, cache()) /
                                                           cache()(1.0, 0.1 / 0.3) * 1.0000001);
}

TEST_CASE("ranked density matches sorted stick-breaking draws at alpha = 1") {
  const int bins = 10;
  const int draws = 100000;
  std::vector<std::size_t> counts(bins * bins, 0);
  RngStream rng(4321);
  for (int i = 0; i < draws; ++i) {
    const auto [m1, m2] = sample_ranked_top2(1.0, rng);
    ++counts[std::min(bins - 1, int(m1 * bins)) * bins + std::min(bins - 1, int(m2 * bins))];
  }
  QuadratureOptions opts;
  // Cell masses need only ~1e-5 absolute accuracy against a 4SE ≈ 1e-3 budget;
  // F̂ is a step function, so tighter tolerances only chase its jumps.
  opts.rel_tol = 1e-5;
  opts.abs_tol = 1e-8;
  opts.max_panels = 200;
  auto cell = [&](double x0, double x1, double y0, double y1, bool with_f) {
    return integrate_adaptive(
               [&](double w1) {
                 const double hi = std::min({y1, w1, 1.0 - w1});
                 if (!(hi > y0)) return 0.0;
                 const double split = std::clamp(0.5 * (1 - w1), y0, hi);
                 auto f = [&](double w2) {
                   if (!(w2 > 0 && w2 < w1 && w1 + w2 < 1)) return 0.0;
                   return with_f ? ranked_joint_density(w1, w2, 1.0, cache()) : 1.0 / (w1 * w2);
                 };
                 double v = 0.0;
                 if (split > y0) v += integrate_adaptive(f, y0, split, opts).values[0];
                 if (hi > split) v += integrate_adaptive(f, split, hi, opts).values[0];
                 return v;
               },
               x0, x1, opts)
        .values[0];
  };
  for (int x = 0; x < bins; ++x) {
    for (int y = 0; y <= x; ++y) {
      const double x0 = double(x) / bins, x1 = double(x + 1) / bins;
      const double y0 = double(y) / bins, y1 = double(y + 1) / bins;
      if (x0 + y0 >= 1) continue;
      const double p = cell(x0, x1, y0, y1, true);
      // F ≤ 1, so the cell mass moves by at most its F ≡ 1 mass times the F̂ error.
      const double f_budget = y0 > 0 ? cell(x0, x1, y0, y1, false) * 4 * cache().max_std_error() : 0.0;
      const double freq = double(counts[x * bins + y]) / draws;
      const double se = std::sqrt(std::max(p * (1 - p), 1e-12) / draws);
      CAPTURE(x);
      CAPTURE(y);
      CAPTURE(p);
      CHECK(std::abs(freq - p) <= 4 * se + f_budget + 1e-9);
    }
  }
}

TEST_CASE("ranked mixed density") {
  // On A with α ~ Ga(1, 1): ∫ α² s^{α-1} e^{-α} dα / (w₁w₂) = 2 / (w₁ w₂ s (1 - log s)³).
  const double w1 = 0.6, w2 = 0.3, s = 0.1;
  const double exact = 2.0 / (w1 * w2 * s * std::pow(1 - std::log(s), 3));
  CHECK(ranked_mixed_density(w1, w2, GammaPrior{1, 1}, cache()) == Approx(exact).epsilon(1e-8));

  // Across the boundary of A, F̂ enters at argument w₂/(1-w₁-w₂) → 1, where
  // 1 - F_α(1-δ) = O(δ^α); continuity is checked per α where that is resolved.
  for (double alpha : {1.0, 2.0, 5.0}) {
    const double below = ranked_joint_density(0.5, 0.25 - 1e-6, alpha, cache());
    const double above = ranked_joint_density(0.5, 0.25 + 1e-6, alpha, cache());
    CAPTURE(alpha);
    CHECK(std::abs(below / above - 1) < 1e-3);
  }

  const double v = ranked_mixed_density(0.5, 0.1, GammaPrior{1.814, 1.036}, cache());
  CHECK(v > 0.0);
  CHECK(std::isfinite(v));
  CHECK_THROWS_AS(ranked_mixed_density(0.5, 0.1, ImproperFlatPrior{}, cache()), UnsupportedPrior);
}

TEST_CASE("regime labels and stationary points") {
  CHECK(regime_derivative_signs(0.5).label() == "increasing/increasing");
  CHECK(regime_derivative_signs(1.0).label() == "increasing/constant");
  CHECK(regime_derivative_signs(1.5).label() == "concave/decreasing");
  CHECK(regime_derivative_signs(2.0).label() == "decreasing/decreasing");
  CHECK(regime_derivative_signs(3.0).label() == "decreasing/decreasing");
  CHECK(regime_derivative_signs(0.5).ranked_label() == "convex/convex");
  CHECK(regime_derivative_signs(1.0).ranked_label() == "decreasing/decreasing");
  CHECK(regime_derivative_signs(1.5).stationary_coefficient.value() == Approx(2.0));
  CHECK_FALSE(regime_derivative_signs(3.0).stationary_coefficient.has_value());
  CHECK(sb_maximizer_w1(1.5, 0.2) == Approx(0.6));
  CHECK(ranked_minimizer(0.5, 0.1) == Approx(0.6));
  CHECK_THROWS_AS(sb_maximizer_w1(0.5, 0.2), DomainError);
  CHECK_THROWS_AS(ranked_minimizer(1.5, 0.2), DomainError);
  CHECK_THROWS_AS(regime_derivative_signs(0.0), DomainError);
}

TEST_CASE("analytic gradients agree with finite differences") {
  const double h = 1e-6;
  for (double alpha : {0.5, 1.5, 3.0}) {
    auto [g1, g2] = sb_density_gradient(0.3, 0.2, alpha);
    CHECK(g1 == Approx((sb_joint_density(0.3 + h, 0.2, alpha) - sb_joint_density(0.3 - h, 0.2, alpha)) / (2 * h)).epsilon(1e-6));
    CHECK(g2 == Approx((sb_joint_density(0.3, 0.2 + h, alpha) - sb_joint_density(0.3, 0.2 - h, alpha)) / (2 * h)).epsilon(1e-6));
    auto [r1, r2] = ranked_a_density_gradient(0.5, 0.3, alpha);
    CHECK(r1 == Approx((ranked_joint_density_a(0.5 + h, 0.3, alpha) - ranked_joint_density_a(0.5 - h, 0.3, alpha)) / (2 * h)).epsilon(1e-6));
    CHECK(r2 == Approx((ranked_joint_density_a(0.5, 0.3 + h, alpha) - ranked_joint_density_a(0.5, 0.3 - h, alpha)) / (2 * h)).epsilon(1e-6));
  }
}

TEST_CASE("size-biased slices follow the regime table") {
  const int m = 400;
  for (double alpha : {0.5, 1.0, 1.5, 2.0, 3.0}) {
    const RegimeReport report = regime_derivative_signs(alpha);
    for (double w2 : {0.05, 0.2, 0.4, 0.7}) {
      std::vector<double> y;
      std::vector<double> xs;
      for (int i = 1; i < m; ++i) {
        const double w1 = (1 - w2) * i / m;
        xs.push_back(w1);
        y.push_back(sb_joint_density(w1, w2, alpha));
      }
      std::size_t turn = 0;
      CAPTURE(alpha);
      CAPTURE(w2);
      const Shape shape = classify(y, &turn);
      if (report.sb_w1 == "concave") {
        const double peak = sb_maximizer_w1(alpha, w2);
        if (peak > xs.front() && peak < xs.back()) {
          CHECK(shape == Shape::Max);
          CHECK(std::abs(xs[turn] - peak) <= 2 * (1 - w2) / m);
        } else {
          CHECK(shape == Shape::Decreasing);
        }
      } else {
        CHECK(shape == expected_shape(report.sb_w1));
      }
    }
    for (double w1 : {0.05, 0.3, 0.6, 0.9}) {
      std::vector<double> y;
      for (int i = 1; i < m; ++i) y.push_back(sb_joint_density(w1, (1 - w1) * i / m, alpha));
      CHECK(classify(y) == expected_shape(report.sb_w2));
    }
  }
}

TEST_CASE("ranked slices on A follow the regime table") {
  const int m = 400;
  for (double alpha : {0.5, 1.0, 2.0}) {
    const RegimeReport report = regime_derivative_signs(alpha);
    CAPTURE(alpha);
    // w₁↓ | w₂↓ on A: w₁ ∈ [max(w₂, 1 - 2w₂), 1 - w₂).
    for (double w2 : {0.1, 0.2, 0.27, 0.3, 0.35, 0.38, 0.45}) {
      const double lo = std::max(w2, 1 - 2 * w2), hi = 1 - w2;
      std::vector<double> xs, y;
      for (int i = 1; i < m; ++i) {
        const double w1 = lo + (hi - lo) * i / m;
        if (!(w2 < w1)) continue;
        xs.push_back(w1);
        y.push_back(ranked_joint_density_a(w1, w2, alpha));
      }
      std::size_t turn = 0;
      const Shape shape = classify(y, &turn);
      CAPTURE(w2);
      if (report.ranked_w1 == "convex") {
        const double trough = ranked_minimizer(alpha, w2);
        if (trough > xs.front() && trough < xs.back()) {
          CHECK(shape == Shape::Min);
          CHECK(std::abs(xs[turn] - trough) <= 2 * (hi - lo) / m);
        } else {
          CHECK(shape == (trough <= xs.front() ? Shape::Increasing : Shape::Decreasing));
        }
      } else {
        CHECK(shape == expected_shape(report.ranked_w1));
      }
    }
    // w₂↓ | w₁↓ on A: w₂ ∈ [(1 - w₁)/2, min(w₁, 1 - w₁)).
    for (double w1 : {0.38, 0.45, 0.5, 0.6, 0.8}) {
      const double lo = 0.5 * (1 - w1), hi = std::min(w1, 1 - w1);
      std::vector<double> xs, y;
      for (int i = 1; i < m; ++i) {
        const double w2 = lo + (hi - lo) * i / m;
        xs.push_back(w2);
        y.push_back(ranked_joint_density_a(w1, w2, alpha));
      }
      std::size_t turn = 0;
      const Shape shape = classify(y, &turn);
      CAPTURE(w1);
      if (report.ranked_w2 == "convex") {
        const double trough = ranked_minimizer(alpha, w1);
        if (trough > xs.front() && trough < xs.back()) {
          CHECK(shape == Shape::Min);
          CHECK(std::abs(xs[turn] - trough) <= 2 * (hi - lo) / m);
        } else {
          CHECK(shape == (trough <= xs.front() ? Shape::Increasing : Shape::Decreasing));
        }
      } else {
        CHECK(shape == expected_shape(report.ranked_w2));
      }
    }
  }
}
