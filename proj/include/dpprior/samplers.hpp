#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dpprior/priors.hpp"

namespace dpprior {

/// Reproducible 64-bit stream: mt19937_64 seeded from splitmix64(seed, stream).
/// Both generator and mixing are fully specified, so draws are identical across
/// platforms. Distinct stream ids give independent substreams for parallel jobs.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  RngStream substream(std::uint64_t id) const;

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on the open interval (0, 1), 53 bits.
  double uniform();
  double normal();
  double cauchy();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// ---------------------------------------------------------------------------
// Stick-breaking

struct GemDraw {
  std::vector<double> weights;  // size-biased w₁..w_H
  double leftover = 1.0;        // Π (1 - v_h)
};

struct GemPolicy {
  int fixed_atoms = 0;           // > 0: stop after exactly this many sticks
  double leftover_tol = 1e-10;   // otherwise stop once leftover < leftover_tol

  static GemPolicy fixed(int h) { return {h, 0.0}; }
  static GemPolicy until_leftover(double eps = 1e-10) { return {0, eps}; }
};

/// One v ~ Beta(1, α), returned as the pair (v, 1 - v) with both sides
/// accurate when v is close to 0 or 1.
std::pair<double, double> sample_beta_one_alpha(double alpha, RngStream& rng);

GemDraw sample_gem(double alpha, RngStream& rng, const GemPolicy& policy = {});

/// Largest weight w₁↓ of a GEM(α) sequence, exact: sticks are broken until
/// the unbroken remainder is smaller than the current maximum.
double sample_ranked_max(double alpha, RngStream& rng);

/// (w₁↓, w₂↓), exact by the same stopping rule against the second largest.
std::pair<double, double> sample_ranked_top2(double alpha, RngStream& rng);

struct McEstimate {
  double value;
  double std_error;
};

/// Monte-Carlo estimate of F_α(x) = p(w₁↓ ≤ x | α).
McEstimate estimate_F_alpha(double alpha, double x, std::size_t draws, RngStream& rng);

/// Exact F_α(x) for x ≥ 1/2, where at most one weight can exceed x:
/// 1 - α ∫ₓ¹ (1-u)^{α-1} / u du.
double f_alpha_upper_half(double alpha, double x);

/// Tabulated F_α on a log-spaced α grid. Each node keeps the sorted w₁↓
/// draws, so F̂ is an empirical CDF, hence nondecreasing in x; between nodes
/// it is interpolated linearly in log α, which preserves monotonicity.
/// α outside the grid is clamped to the nearest node. Read-only after
/// construction.
class FAlphaCache {
 public:
  struct Options {
    std::size_t draws_per_node = 100000;
    int nodes = 33;
    double alpha_min = 1e-2;
    double alpha_max = 1e2;
    std::uint64_t seed = 0;
  };

  FAlphaCache();
  explicit FAlphaCache(const Options& options);

  double operator()(double alpha, double x) const;

  const std::vector<double>& alphas() const { return alphas_; }
  std::size_t draws_per_node() const { return options_.draws_per_node; }
  /// Worst-case binomial standard error of any node estimate, 0.5/√draws.
  double max_std_error() const;

 private:
  double node_cdf(std::size_t node, double x) const;

  Options options_;
  std::vector<double> alphas_;
  std::vector<double> log_alphas_;
  std::vector<std::vector<double>> sorted_;
};

// ---------------------------------------------------------------------------
// Cluster counts

/// Kₙ = Σᵢ Bernoulli(α / (α + i - 1)).
int sample_crp_kn(int n, double alpha, RngStream& rng);

// ---------------------------------------------------------------------------
// Jeffreys samplers

struct ChainDiagnostics {
  double acceptance_rate = 0.0;
  double iat = 1.0;          // integrated autocorrelation time of log α
  std::size_t proposals = 0;
};

struct JeffreysChain {
  std::vector<double> draws;
  ChainDiagnostics diagnostics;
};

/// f/g for the Jeffreys(n) kernel f against the Jeffreys(2) kernel
/// g = 1/((α+1)√α). Increasing in α, from √H_{n-1} at 0 up to √(n(n-1)/2).
double jeffreys_ar_ratio(int n, double alpha);

/// √(n(n-1)/2), the accept-reject envelope constant.
double jeffreys_ar_bound(int n);

/// Draws from Jeffreys(2) by inverting its CDF: α = tan²(πU/2).
double sample_jeffreys2(RngStream& rng);

/// i.i.d. exact draws by accept-reject with the Jeffreys(2) proposal.
double sample_jeffreys_ar(int n, RngStream& rng);
JeffreysChain sample_jeffreys_ar(int n, RngStream& rng, std::size_t draws);

/// Slice sampler on the 2-d region under the target, in the coordinate
/// u = (2/π) atan √α where the Jeffreys(2) part is uniform. The remaining
/// factor is increasing in u, so each horizontal slice is an interval [u*, 1).
JeffreysChain sample_jeffreys_slice(int n, RngStream& rng, std::size_t iterations);

enum class MhProposal { IndependenceJeffreys2, RwHalfCauchy, RwNormal };

MhProposal parse_mh_proposal(const std::string& tag);
std::string to_string(MhProposal proposal);

struct MhOptions {
  double scale = 1.0;         // random-walk scale
  double initial_alpha = 1.0;
};

JeffreysChain sample_jeffreys_mh(int n, RngStream& rng, MhProposal proposal,
                                 std::size_t iterations, const MhOptions& options = {});

// ---------------------------------------------------------------------------
// Diagnostics

/// Integrated autocorrelation time with Sokal's automatic window (c = 5).
double integrated_autocorrelation_time(std::span<const double> series);

/// sup |F̂ - F| of the sample against a continuous CDF.
double ks_distance(std::span<const double> sample, const std::function<double(double)>& cdf);

/// Asymptotic Kolmogorov p-value P(√N D > √N d).
double ks_pvalue(double d, std::size_t n);

/// Pearson statistic and p-value of counts against probabilities; cells with
/// expected count below min_expected are pooled into one.
struct ChiSquareResult {
  double statistic;
  int dof;
  double p_value;
};
ChiSquareResult chi_square_test(std::span<const std::size_t> counts, std::span<const double> probs,
                                double min_expected = 5.0);

/// CDF of a proper prior tabulated on a log-spaced grid by accumulating
/// panel integrals of the normalized density; exact cdf() outside the grid.
/// Meant for evaluating many sample points cheaply.
class TabulatedCdf {
 public:
  explicit TabulatedCdf(const PriorSpec& prior, double lo = 1e-10, double hi = 1e14,
                        int nodes = 4097);
  double operator()(double x) const;

 private:
  PriorSpec prior_;
  double log_lo_;
  double log_hi_;
  double step_;
  std::vector<double> values_;
};

}  // namespace dpprior
