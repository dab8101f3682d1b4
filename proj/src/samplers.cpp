#include "dpprior/samplers.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <numbers>
#include <numeric>
#include <thread>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/tools/roots.hpp>

#include "dpprior/errors.hpp"

namespace dpprior {

namespace {

constexpr double kPi = std::numbers::pi;

void require_alpha(double alpha, const char* who) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw DomainError(std::string(who) + ": alpha must be a finite positive number");
  }
}

void require_jeffreys_n(int n, const char* who) {
  if (n < 2) {
    throw UnsupportedPrior(std::string(who) + ": the Jeffreys prior needs n >= 2");
  }
}

// α from v = 1 - u, where u = (2/π) atan √α. Working with v keeps the
// right tail (u near 1) at full precision.
double alpha_from_upper(double v) {
  const double t = std::tan(0.5 * kPi * v);
  return 1.0 / (t * t);
}

double upper_from_alpha(double alpha) {
  return (2.0 / kPi) * std::atan(1.0 / std::sqrt(alpha));
}

}  // namespace

// ---------------------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(splitmix64(splitmix64(seed) ^ splitmix64(~stream))) {}

RngStream RngStream::substream(std::uint64_t id) const {
  return RngStream(seed_, splitmix64(stream_ + 0x632be59bd9b4e019ULL * (id + 1)));
}

double RngStream::uniform() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  // Box–Muller, one output per call so the stream position is predictable.
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  return r * std::cos(2.0 * kPi * uniform());
}

double RngStream::cauchy() { return std::tan(kPi * (uniform() - 0.5)); }

// ---------------------------------------------------------------------------

std::pair<double, double> sample_beta_one_alpha(double alpha, RngStream& rng) {
  // 1 - v = U^{1/α}
  const double x = std::log(rng.uniform()) / alpha;
  return {-std::expm1(x), std::exp(x)};
}

GemDraw sample_gem(double alpha, RngStream& rng, const GemPolicy& policy) {
  require_alpha(alpha, "sample_gem");
  if (policy.fixed_atoms <= 0 && !(policy.leftover_tol > 0.0 && policy.leftover_tol < 1.0)) {
    throw InvalidArgument("sample_gem: need a fixed atom count or a leftover tolerance in (0,1)");
  }
  GemDraw draw;
  double rest = 1.0;
  while (true) {
    if (policy.fixed_atoms > 0) {
      if (static_cast<int>(draw.weights.size()) >= policy.fixed_atoms) break;
    } else if (rest < policy.leftover_tol) {
      break;
    }
    const auto [v, one_minus_v] = sample_beta_one_alpha(alpha, rng);
    draw.weights.push_back(rest * v);
    rest *= one_minus_v;
  }
  draw.leftover = rest;
  return draw;
}

double sample_ranked_max(double alpha, RngStream& rng) {
  require_alpha(alpha, "sample_ranked_max");
  double rest = 1.0;
  double best = 0.0;
  do {
    const auto [v, one_minus_v] = sample_beta_one_alpha(alpha, rng);
    best = std::max(best, rest * v);
    rest *= one_minus_v;
  } while (rest >= best);
  return best;
}

std::pair<double, double> sample_ranked_top2(double alpha, RngStream& rng) {
  require_alpha(alpha, "sample_ranked_top2");
  double rest = 1.0;
  double first = 0.0;
  double second = 0.0;
  do {
    const auto [v, one_minus_v] = sample_beta_one_alpha(alpha, rng);
    const double w = rest * v;
    if (w > first) {
      second = first;
      first = w;
    } else if (w > second) {
      second = w;
    }
    rest *= one_minus_v;
  } while (rest >= second);
  return {first, second};
}

McEstimate estimate_F_alpha(double alpha, double x, std::size_t draws, RngStream& rng) {
  require_alpha(alpha, "estimate_F_alpha");
  if (!(x >= 0.0)) throw DomainError("estimate_F_alpha: x must be >= 0");
  if (draws == 0) throw InvalidArgument("estimate_F_alpha: draws must be >= 1");
  if (x >= 1.0) return {1.0, 0.0};
  if (x == 0.0) return {0.0, 0.0};
  std::size_t hits = 0;
  for (std::size_t i = 0; i < draws; ++i) hits += sample_ranked_max(alpha, rng) <= x;
  const double p = static_cast<double>(hits) / draws;
  return {p, std::sqrt(p * (1.0 - p) / draws)};
}

double f_alpha_upper_half(double alpha, double x) {
  require_alpha(alpha, "f_alpha_upper_half");
  if (!(x >= 0.5)) throw DomainError("f_alpha_upper_half: x must be >= 1/2");
  if (x >= 1.0) return 1.0;
  // With s = (1-u)^α the tail integral becomes ∫₀^{(1-x)^α} ds / (1 - s^{1/α}),
  // whose integrand stays within [1, 1/x].
  const double top = std::pow(1.0 - x, alpha);
  QuadratureOptions opts;
  opts.rel_tol = 1e-13;
  const auto r = integrate_adaptive(
      [alpha](double s) { return 1.0 / -std::expm1(std::log(s) / alpha); }, 0.0, top, opts);
  return 1.0 - r.values[0];
}

// ---------------------------------------------------------------------------

FAlphaCache::FAlphaCache() : FAlphaCache(Options{}) {}

FAlphaCache::FAlphaCache(const Options& options) : options_(options) {
  if (options.nodes < 2 || !(options.alpha_min > 0.0) || !(options.alpha_max > options.alpha_min) ||
      options.draws_per_node == 0) {
    throw InvalidArgument("FAlphaCache: bad grid options");
  }
  const double lo = std::log(options.alpha_min);
  const double hi = std::log(options.alpha_max);
  const RngStream root(options.seed, 0xF0A1);
  for (int i = 0; i < options.nodes; ++i) {
    const double la = i + 1 == options.nodes ? hi : lo + (hi - lo) * i / (options.nodes - 1);
    log_alphas_.push_back(la);
    alphas_.push_back(std::exp(la));
  }
  // Each node owns its substream, so the result does not depend on how the
  // nodes are scheduled.
  sorted_.resize(alphas_.size());
  auto build = [&](std::size_t i) {
    RngStream rng = root.substream(i);
    std::vector<double> draws(options.draws_per_node);
    for (double& d : draws) d = sample_ranked_max(alphas_[i], rng);
    std::sort(draws.begin(), draws.end());
    sorted_[i] = std::move(draws);
  };
  const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 16);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < alphas_.size(); i = next++) build(i);
    });
  }
  for (auto& t : pool) t.join();
}

double FAlphaCache::node_cdf(std::size_t node, double x) const {
  const auto& s = sorted_[node];
  const auto count = std::upper_bound(s.begin(), s.end(), x) - s.begin();
  return static_cast<double>(count) / s.size();
}

double FAlphaCache::operator()(double alpha, double x) const {
  require_alpha(alpha, "FAlphaCache");
  if (!(x >= 0.0)) throw DomainError("FAlphaCache: x must be >= 0");
  if (x >= 1.0) return 1.0;
  const double la = std::log(alpha);
  if (la <= log_alphas_.front()) return node_cdf(0, x);
  if (la >= log_alphas_.back()) return node_cdf(log_alphas_.size() - 1, x);
  const double step = log_alphas_[1] - log_alphas_[0];
  const auto i = std::min<std::size_t>(static_cast<std::size_t>((la - log_alphas_.front()) / step),
                                       log_alphas_.size() - 2);
  const double t = std::clamp((la - log_alphas_[i]) / step, 0.0, 1.0);
  return (1.0 - t) * node_cdf(i, x) + t * node_cdf(i + 1, x);
}

double FAlphaCache::max_std_error() const {
  return 0.5 / std::sqrt(static_cast<double>(options_.draws_per_node));
}

// ---------------------------------------------------------------------------

int sample_crp_kn(int n, double alpha, RngStream& rng) {
  if (n < 1) throw InvalidArgument("sample_crp_kn: n must be >= 1");
  require_alpha(alpha, "sample_crp_kn");
  int k = 1;  // the first customer always opens a table
  for (int i = 2; i <= n; ++i) k += rng.uniform() * (alpha + i - 1.0) < alpha;
  return k;
}

// ---------------------------------------------------------------------------

double jeffreys_ar_bound(int n) {
  require_jeffreys_n(n, "jeffreys_ar_bound");
  return std::sqrt(0.5 * n * (n - 1.0));
}

double jeffreys_ar_ratio(int n, double alpha) {
  require_jeffreys_n(n, "jeffreys_ar_ratio");
  require_alpha(alpha, "jeffreys_ar_ratio");
  // Σ j ((α+1)/(α+j))², each term bounded by j.
  if (n <= 256) {
    double acc = 0.0;
    for (int j = 1; j < n; ++j) {
      const double r = (alpha + 1.0) / (alpha + j);
      acc += j * r * r;
    }
    return std::sqrt(acc);
  }
  return jeffreys_fisher_root(n, alpha) * (alpha + 1.0) * std::sqrt(alpha);
}

double sample_jeffreys2(RngStream& rng) {
  const double u = rng.uniform();
  if (u < 0.5) {
    const double t = std::tan(0.5 * kPi * u);
    return t * t;
  }
  return alpha_from_upper(1.0 - u);
}

namespace {

double ar_draw(int n, double bound, RngStream& rng, std::size_t& proposals) {
  while (true) {
    const double alpha = sample_jeffreys2(rng);
    ++proposals;
    if (!(alpha > 0.0) || !std::isfinite(alpha)) continue;
    const double ratio = jeffreys_ar_ratio(n, alpha);
    assert(ratio <= bound * (1.0 + 1e-12) && "accept-reject envelope violated");
    if (rng.uniform() * bound <= ratio) return alpha;
  }
}

std::vector<double> logs_of(const std::vector<double>& draws) {
  std::vector<double> out(draws.size());
  std::transform(draws.begin(), draws.end(), out.begin(), [](double a) { return std::log(a); });
  return out;
}

void finish(JeffreysChain& chain, std::size_t accepted) {
  chain.diagnostics.acceptance_rate =
      chain.diagnostics.proposals ? static_cast<double>(accepted) / chain.diagnostics.proposals : 0.0;
  const auto logs = logs_of(chain.draws);
  chain.diagnostics.iat = integrated_autocorrelation_time(logs);
}

void require_iterations(std::size_t iterations) {
  if (iterations == 0) throw InvalidArgument("sampler: iterations must be >= 1");
}

}  // namespace

double sample_jeffreys_ar(int n, RngStream& rng) {
  std::size_t proposals = 0;
  return ar_draw(n, jeffreys_ar_bound(n), rng, proposals);
}

JeffreysChain sample_jeffreys_ar(int n, RngStream& rng, std::size_t draws) {
  require_iterations(draws);
  const double bound = jeffreys_ar_bound(n);
  JeffreysChain chain;
  chain.draws.reserve(draws);
  for (std::size_t i = 0; i < draws; ++i) {
    chain.draws.push_back(ar_draw(n, bound, rng, chain.diagnostics.proposals));
  }
  finish(chain, draws);
  return chain;
}

JeffreysChain sample_jeffreys_slice(int n, RngStream& rng, std::size_t iterations) {
  require_jeffreys_n(n, "sample_jeffreys_slice");
  require_iterations(iterations);
  const double floor_ratio = jeffreys_ar_ratio(n, 1e-300);
  JeffreysChain chain;
  chain.draws.reserve(iterations);
  double alpha = 1.0;
  for (std::size_t it = 0; it < iterations; ++it) {
    const double level = rng.uniform() * jeffreys_ar_ratio(n, alpha);
    // Slice in v = 1 - u is (0, v*], v* the point where the ratio hits the level.
    double v_star = 1.0;
    if (level > floor_ratio) {
      auto g = [&](double log_a) { return jeffreys_ar_ratio(n, std::exp(log_a)) - level; };
      double lo = std::log(alpha);
      double hi = lo;
      while (g(lo) > 0.0) lo -= 4.0;
      while (g(hi) < 0.0) hi += 4.0;
      boost::uintmax_t max_iter = 200;
      const auto root = boost::math::tools::toms748_solve(
          g, lo, hi, boost::math::tools::eps_tolerance<double>(50), max_iter);
      v_star = upper_from_alpha(std::exp(0.5 * (root.first + root.second)));
    }
    alpha = alpha_from_upper(v_star * rng.uniform());
    chain.draws.push_back(alpha);
  }
  chain.diagnostics.proposals = iterations;
  finish(chain, iterations);
  return chain;
}

MhProposal parse_mh_proposal(const std::string& tag) {
  if (tag == "independence-jeffreys2" || tag == "independence") return MhProposal::IndependenceJeffreys2;
  if (tag == "rw-half-cauchy") return MhProposal::RwHalfCauchy;
  if (tag == "rw-normal") return MhProposal::RwNormal;
  throw InvalidArgument("unsupported MH proposal '" + tag +
                        "' (expected independence-jeffreys2, rw-half-cauchy or rw-normal)");
}

std::string to_string(MhProposal proposal) {
  switch (proposal) {
    case MhProposal::IndependenceJeffreys2: return "independence-jeffreys2";
    case MhProposal::RwHalfCauchy: return "rw-half-cauchy";
    case MhProposal::RwNormal: return "rw-normal";
  }
  return "?";
}

JeffreysChain sample_jeffreys_mh(int n, RngStream& rng, MhProposal proposal,
                                 std::size_t iterations, const MhOptions& options) {
  require_jeffreys_n(n, "sample_jeffreys_mh");
  require_iterations(iterations);
  require_alpha(options.initial_alpha, "sample_jeffreys_mh");
  if (!(options.scale > 0.0)) throw InvalidArgument("sample_jeffreys_mh: scale must be > 0");

  // Independence chain targets f/g against g; random walks target f directly.
  // The folded (reflected at 0) walks are symmetric, so no Hastings term.
  const bool independence = proposal == MhProposal::IndependenceJeffreys2;
  auto log_target = [&](double a) {
    return independence ? std::log(jeffreys_ar_ratio(n, a)) : std::log(jeffreys_fisher_root(n, a));
  };

  JeffreysChain chain;
  chain.draws.reserve(iterations);
  double alpha = options.initial_alpha;
  double current = log_target(alpha);
  std::size_t accepted = 0;
  for (std::size_t it = 0; it < iterations; ++it) {
    double cand = 0.0;
    switch (proposal) {
      case MhProposal::IndependenceJeffreys2: cand = sample_jeffreys2(rng); break;
      case MhProposal::RwHalfCauchy: cand = std::abs(alpha + options.scale * rng.cauchy()); break;
      case MhProposal::RwNormal: cand = std::abs(alpha + options.scale * rng.normal()); break;
    }
    const double u = rng.uniform();
    if (cand > 0.0 && std::isfinite(cand)) {
      const double proposed = log_target(cand);
      if (std::log(u) < proposed - current) {
        alpha = cand;
        current = proposed;
        ++accepted;
      }
    }
    chain.draws.push_back(alpha);
  }
  chain.diagnostics.proposals = iterations;
  finish(chain, accepted);
  return chain;
}

// ---------------------------------------------------------------------------

double integrated_autocorrelation_time(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 2) return 1.0;
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / n;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = series[i] - mean;
  double c0 = 0.0;
  for (double v : x) c0 += v * v;
  if (!(c0 > 0.0)) return static_cast<double>(n);  // frozen chain
  double tau = 1.0;
  for (std::size_t lag = 1; lag < n / 2; ++lag) {
    double c = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) c += x[i] * x[i + lag];
    tau += 2.0 * c / c0;
    if (static_cast<double>(lag) >= 5.0 * tau) break;
  }
  return std::max(tau, 1e-3);
}

double ks_distance(std::span<const double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw InvalidArgument("ks_distance: empty sample");
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

double ks_pvalue(double d, std::size_t n) {
  const double x = std::sqrt(static_cast<double>(n)) * d;
  if (x < 0.2) return 1.0;
  // Q(x) = 2 Σ (-1)^{k-1} exp(-2 k² x²)
  double q = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    q += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(q, 0.0, 1.0);
}

ChiSquareResult chi_square_test(std::span<const std::size_t> counts, std::span<const double> probs,
                                double min_expected) {
  if (counts.size() != probs.size() || counts.empty()) {
    throw InvalidArgument("chi_square_test: counts and probs must have the same nonzero length");
  }
  const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::size_t{0}));
  double stat = 0.0;
  int cells = 0;
  double pooled_expected = 0.0;
  double pooled_observed = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double e = total * probs[i];
    if (e < min_expected) {
      pooled_expected += e;
      pooled_observed += counts[i];
      continue;
    }
    stat += (counts[i] - e) * (counts[i] - e) / e;
    ++cells;
  }
  if (pooled_expected > 0.0) {
    stat += (pooled_observed - pooled_expected) * (pooled_observed - pooled_expected) / pooled_expected;
    ++cells;
  }
  const int dof = std::max(cells - 1, 1);
  const boost::math::chi_squared dist(dof);
  return {stat, dof, boost::math::cdf(boost::math::complement(dist, stat))};
}

// ---------------------------------------------------------------------------

TabulatedCdf::TabulatedCdf(const PriorSpec& prior, double lo, double hi, int nodes)
    : prior_(prior), log_lo_(std::log(lo)), log_hi_(std::log(hi)) {
  if (!is_proper(prior)) throw UnsupportedPrior("TabulatedCdf: prior must be proper");
  if (!(lo > 0.0 && hi > lo) || nodes < 2) throw InvalidArgument("TabulatedCdf: bad grid");
  step_ = (log_hi_ - log_lo_) / (nodes - 1);
  values_.resize(static_cast<std::size_t>(nodes));
  values_[0] = cdf(prior, lo);
  QuadratureOptions opts;
  opts.rel_tol = 1e-10;
  opts.abs_tol = 1e-17;
  auto density = [&](double t) {
    const double a = std::exp(t);
    return std::exp(log_density_normalized(prior_, a) + t);
  };
  for (int i = 1; i < nodes; ++i) {
    const double t0 = log_lo_ + step_ * (i - 1);
    values_[i] = values_[i - 1] + integrate_adaptive(density, t0, t0 + step_, opts).values[0];
  }
}

double TabulatedCdf::operator()(double x) const {
  if (!(x > 0.0)) return 0.0;
  const double t = std::log(x);
  if (t <= log_lo_ || t >= log_hi_) return cdf(prior_, x);
  const double pos = (t - log_lo_) / step_;
  const auto i = std::min(static_cast<std::size_t>(pos), values_.size() - 2);
  const double frac = pos - i;
  return std::min(1.0, (1.0 - frac) * values_[i] + frac * values_[i + 1]);
}

}  // namespace dpprior
