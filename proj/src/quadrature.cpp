#include "dpprior/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>

#include "dpprior/errors.hpp"

namespace dpprior {

namespace {

constexpr int kOrder = 10;

struct Rule {
  std::array<double, kOrder> nodes{};
  std::array<double, kOrder> weights{};
};

// Gauss-Legendre nodes on [-1, 1] by Newton iteration on P_n.
Rule make_rule() {
  Rule rule;
  for (int i = 0; i < kOrder; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (kOrder + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= kOrder; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = kOrder * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

const Rule& rule() {
  static const Rule r = make_rule();
  return r;
}

void apply_rule(const VectorIntegrand& f, double lo, double hi, std::span<double> out,
                std::span<double> scratch) {
  const Rule& r = rule();
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  std::fill(out.begin(), out.end(), 0.0);
  for (int i = 0; i < kOrder; ++i) {
    f(mid + half * r.nodes[i], scratch);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += r.weights[i] * scratch[j];
  }
  for (double& v : out) v *= half;
}

struct Panel {
  double lo;
  double hi;
  std::vector<double> left;
  std::vector<double> right;
  double error;
};

struct ByError {
  bool operator()(const Panel& a, const Panel& b) const { return a.error < b.error; }
};

}  // namespace

QuadratureResult integrate_adaptive(const VectorIntegrand& f, std::size_t dimension,
                                    double lo, double hi, const QuadratureOptions& options) {
  if (dimension == 0) throw InvalidArgument("integrate_adaptive: zero dimension");
  if (!(hi > lo)) throw InvalidArgument("integrate_adaptive: empty interval");

  std::vector<double> scratch(dimension);
  std::vector<double> coarse(dimension);

  auto make_panel = [&](double a, double b, std::span<const double> whole) {
    Panel p{a, b, std::vector<double>(dimension), std::vector<double>(dimension), 0.0};
    const double m = 0.5 * (a + b);
    apply_rule(f, a, m, p.left, scratch);
    apply_rule(f, m, b, p.right, scratch);
    for (std::size_t j = 0; j < dimension; ++j) {
      p.error += std::abs(p.left[j] + p.right[j] - whole[j]);
    }
    return p;
  };

  apply_rule(f, lo, hi, coarse, scratch);
  std::priority_queue<Panel, std::vector<Panel>, ByError> queue;
  queue.push(make_panel(lo, hi, coarse));

  std::vector<double> total(dimension, 0.0);
  double total_error = 0.0;
  auto add = [&](const Panel& p, double sign) {
    for (std::size_t j = 0; j < dimension; ++j) total[j] += sign * (p.left[j] + p.right[j]);
    total_error += sign * p.error;
  };
  add(queue.top(), 1.0);

  QuadratureResult result;
  std::size_t panels = 1;
  while (true) {
    double magnitude = 0.0;
    for (double v : total) magnitude += std::abs(v);
    if (total_error <= std::max(options.abs_tol, options.rel_tol * magnitude)) {
      result.converged = true;
      break;
    }
    if (panels >= options.max_panels) break;
    Panel worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      // Cannot bisect further in floating point; accept this panel as is.
      worst.error = 0.0;
      queue.push(std::move(worst));
      total_error = 0.0;
      auto copy = queue;
      while (!copy.empty()) {
        total_error += copy.top().error;
        copy.pop();
      }
      continue;
    }
    add(worst, -1.0);
    Panel a = make_panel(worst.lo, mid, worst.left);
    Panel b = make_panel(mid, worst.hi, worst.right);
    add(a, 1.0);
    add(b, 1.0);
    queue.push(std::move(a));
    queue.push(std::move(b));
    ++panels;
  }

  // Re-sum from the panels to shed the drift of incremental updates.
  std::fill(total.begin(), total.end(), 0.0);
  total_error = 0.0;
  while (!queue.empty()) {
    const Panel& p = queue.top();
    for (std::size_t j = 0; j < dimension; ++j) total[j] += p.left[j] + p.right[j];
    total_error += p.error;
    queue.pop();
  }
  result.values = std::move(total);
  result.error_estimate = total_error;
  result.panels = panels;
  return result;
}

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double lo,
                                    double hi, const QuadratureOptions& options) {
  return integrate_adaptive([&](double x, std::span<double> out) { out[0] = f(x); }, 1, lo,
                            hi, options);
}

}  // namespace dpprior
