#include "dpprior/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>
#include <variant>

#include "CLI11.hpp"

#include "dpprior/errors.hpp"
#include "dpprior/kn.hpp"
#include "dpprior/priors.hpp"
#include "dpprior/samplers.hpp"
#include "dpprior/ssd.hpp"
#include "dpprior/ssi.hpp"

namespace dpprior {

namespace {

using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  nlohmann::json trailer = nlohmann::json::object();  // extra sections after the rows
  int n_max = 0;                                      // Stirling table used, 0 if none
};

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_cell(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          return format_double(v);
        } else if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else {
          return std::to_string(v);
        }
      },
      cell);
}

void write_table(const Table& table, const RunConfig& config, std::ostream& os) {
  nlohmann::json header = to_json(config);
  header["version"] = DPPRIOR_VERSION;
  header["n_max"] = table.n_max;

  if (config.format == OutputFormat::Csv) {
    os << "# config " << header.dump() << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      os << (i ? "," : "") << table.columns[i];
    }
    os << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
      os << '\n';
    }
    for (const auto& [key, value] : table.trailer.items()) os << "# " << key << ' ' << value.dump() << '\n';
    return;
  }

  nlohmann::json doc;
  doc["config"] = header;
  if (!table.columns.empty()) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
      nlohmann::json r = nlohmann::json::object();
      for (std::size_t i = 0; i < row.size(); ++i) {
        std::visit([&](const auto& v) { r[table.columns[i]] = v; }, row[i]);
      }
      rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);
  }
  for (const auto& [key, value] : table.trailer.items()) doc[key] = value;
  os << doc.dump(2) << '\n';
}

// "0.25", "1/3", "1e-3"; the whole string must be consumed.
double parse_number(const std::string& text) {
  auto parse_plain = [&](std::string_view s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
      throw InvalidArgument("cannot parse '" + text + "' as a number");
    }
    return v;
  };
  const auto slash = text.find('/');
  if (slash == std::string::npos) return parse_plain(text);
  const double den = parse_plain(std::string_view(text).substr(slash + 1));
  if (den == 0.0) throw InvalidArgument("zero denominator in '" + text + "'");
  return parse_plain(std::string_view(text).substr(0, slash)) / den;
}

std::vector<double> parse_numbers(const std::vector<std::string>& items) {
  std::vector<double> out;
  for (const auto& s : items) out.push_back(parse_number(s));
  return out;
}

int parse_int(const std::string& text) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw InvalidArgument("cannot parse '" + text + "' as an integer");
  }
  return v;
}

// Items are integers or inclusive ranges lo:hi:step.
std::vector<int> parse_n_list(const std::vector<std::string>& items) {
  std::vector<int> out;
  for (const auto& item : items) {
    const auto c1 = item.find(':');
    if (c1 == std::string::npos) {
      out.push_back(parse_int(item));
      continue;
    }
    const auto c2 = item.find(':', c1 + 1);
    const int lo = parse_int(item.substr(0, c1));
    const int hi = parse_int(item.substr(c1 + 1, c2 == std::string::npos ? std::string::npos : c2 - c1 - 1));
    const int step = c2 == std::string::npos ? 1 : parse_int(item.substr(c2 + 1));
    if (step <= 0 || hi < lo) throw InvalidArgument("bad range '" + item + "'");
    for (int n = lo; n <= hi; n += step) out.push_back(n);
  }
  if (out.empty()) throw InvalidArgument("--n needs at least one value");
  return out;
}

// A JSON object, or a bare family name such as "jeffreys".
PriorSpec parse_prior(const std::string& text, int default_n) {
  nlohmann::json j;
  if (!text.empty() && text.front() == '{') {
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw InvalidArgument(std::string("--prior is not valid JSON: ") + e.what());
    }
  } else {
    j = text;
  }
  PriorSpec prior = prior_from_json(j, default_n);
  validate(prior);
  return prior;
}

std::vector<double> read_pmf_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open target file '" + path + "'");
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::string field;
    while (fields >> field) values.push_back(parse_number(field));
  }
  return values;
}

void require_positive_count(std::int64_t value, const char* name) {
  if (value <= 0) throw InvalidArgument(std::string(name) + " must be positive");
}

// Evaluates f(i) for i in [0, count) on a small thread pool. Each index is
// written to its own slot, so the result is independent of scheduling.
template <class F>
void parallel_for(std::size_t count, F&& f) {
  const std::size_t workers =
      std::min<std::size_t>(count, std::clamp(std::thread::hardware_concurrency(), 1u, 16u));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        f(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------
// Subcommands. Each resolves its arguments into config.params and returns
// the rows to print.

struct DoroArgs {
  std::vector<std::string> n;
  std::string target = "uniform";
  std::string direction = "target-to-induced";
};

Table run_doro(const DoroArgs& args, RunConfig& config) {
  const std::vector<int> ns = parse_n_list(args.n);
  DoroOptions options;
  if (args.direction == "target-to-induced") {
    options.direction = KlDirection::TargetToInduced;
  } else if (args.direction == "induced-to-target") {
    options.direction = KlDirection::InducedToTarget;
  } else {
    throw InvalidArgument("--kl-direction must be target-to-induced or induced-to-target");
  }
  std::vector<double> file_target;
  if (args.target != "uniform") {
    file_target = read_pmf_file(args.target);
    if (ns.size() != 1) throw InvalidArgument("a target file fixes n; pass a single --n");
  }
  config.params = {{"n", ns}, {"target", args.target}, {"kl_direction", args.direction}};

  for (int n : ns) {
    if (n < 2) throw InvalidArgument("doro: n = " + std::to_string(n) + " has no fit; need n >= 2");
  }
  const auto table = shared_stirling_table(*std::max_element(ns.begin(), ns.end()));
  Table out;
  out.n_max = table->n_max();
  out.columns = {"n", "a", "b", "objective", "iterations"};
  for (int n : ns) {
    const std::vector<double> target = file_target.empty() ? uniform_target(n) : file_target;
    const DoroFit fit = doro_fit(n, target, *table, options);
    out.rows.push_back({std::int64_t{n}, fit.a, fit.b, fit.kl, std::int64_t{fit.iterations}});
  }
  return out;
}

struct ScalArgs {
  std::vector<std::string> n;
  double p1 = 0.34;
  double tail = 0.15;
  double c0 = 2.0;
  bool approx = false;
};

Table run_scal(const ScalArgs& args, RunConfig& config) {
  const std::vector<int> ns = parse_n_list(args.n);
  config.params = {{"n", ns}, {"p1", args.p1}, {"tail", args.tail}, {"c0", args.c0}, {"approx", args.approx}};
  for (int n : ns) {
    if (n < 3) throw InvalidArgument("scal: need n >= 3, got " + std::to_string(n));
    const int c = scal_cutoff(n, args.c0);
    if (c < 2 || c > n) {
      throw InvalidArgument("scal: cutoff c = " + std::to_string(c) + " outside [2, " + std::to_string(n) + "]");
    }
  }
  const auto table = shared_stirling_table(*std::max_element(ns.begin(), ns.end()));
  Table out;
  out.n_max = table->n_max();
  out.columns = {"n", "c", "a", "b", "p1", "tail", "method", "iterations"};
  for (int n : ns) {
    if (args.approx) {
      const auto [a, b] = scal_approx(n);
      const int c = scal_cutoff(n, args.c0);
      const auto [p1, tail] = scal_probabilities(n, c, a, b, *table);
      out.rows.push_back({std::int64_t{n}, std::int64_t{c}, a, b, p1, tail, std::string("approx"), std::int64_t{0}});
    } else {
      const ScalFit fit = scal_fit(n, args.p1, args.tail, args.c0, *table);
      out.rows.push_back({std::int64_t{n}, std::int64_t{fit.c}, fit.a, fit.b, fit.p1, fit.tail, fit.method,
                          std::int64_t{fit.iterations}});
    }
  }
  return out;
}

struct ElicitArgs {
  std::string family;
  std::vector<std::string> thresholds;
  std::vector<std::string> probs;
};

Table run_elicit(const ElicitArgs& args, RunConfig& config) {
  ElicitationProblem problem{parse_elicit_family(args.family), parse_numbers(args.thresholds),
                             parse_numbers(args.probs)};
  config.params = to_json(problem);
  const ElicitationResult result = elicit(problem);
  Table out;
  out.columns = {"parameter", "value"};
  const nlohmann::json prior = to_json(result.prior);
  for (const auto& [name, value] : prior["params"].items()) {
    out.rows.push_back({name, value.get<double>()});
  }
  out.trailer["result"] = to_json(result);
  return out;
}

struct KnArgs {
  int n = 0;
  std::optional<double> alpha;
  std::string prior;
};

Table run_kn(const KnArgs& args, RunConfig& config) {
  if (args.n < 1) throw InvalidArgument("kn: n must be >= 1");
  const auto table = shared_stirling_table(args.n);
  KnPmf pmf;
  if (args.alpha) {
    config.params = {{"n", args.n}, {"alpha", *args.alpha}};
    pmf = kn_pmf_given_alpha(args.n, *args.alpha, *table);
  } else {
    const PriorSpec prior = parse_prior(args.prior, args.n);
    config.params = {{"n", args.n}, {"prior", to_json(prior)}};
    pmf = kn_pmf_mixed(args.n, prior, *table);
  }
  Table out;
  out.n_max = table->n_max();
  out.columns = {"k", "p"};
  for (int k = 1; k <= args.n; ++k) out.rows.push_back({std::int64_t{k}, pmf.at(k)});
  out.trailer["summary"] = {{"mean", pmf.mean()}, {"variance", pmf.variance()}, {"mass_deficit", pmf.mass_deficit}};
  return out;
}

struct GridArgs {
  std::string mode;
  std::optional<double> alpha;
  std::string prior;
  int grid = 50;
  std::int64_t draws_per_node = 100000;
};

Table run_weights_grid(const GridArgs& args, RunConfig& config) {
  if (args.mode != "sb" && args.mode != "ranked") throw InvalidArgument("--mode must be sb or ranked");
  if (args.grid < 2) throw InvalidArgument("--grid must be >= 2");
  const bool ranked = args.mode == "ranked";
  if (ranked) require_positive_count(args.draws_per_node, "--draws-per-node");

  std::optional<PriorSpec> prior;
  config.params = {{"mode", args.mode}, {"grid", args.grid}};
  if (args.alpha) {
    if (!(*args.alpha > 0.0) || !std::isfinite(*args.alpha)) throw DomainError("--alpha must be finite and > 0");
    config.params["alpha"] = *args.alpha;
  } else {
    prior = parse_prior(args.prior, 0);
    if (!is_proper(*prior)) throw UnsupportedPrior("prior '" + family_name(*prior) + "' is improper");
    config.params["prior"] = to_json(*prior);
  }

  std::optional<FAlphaCache> cache;
  if (ranked) {
    FAlphaCache::Options options;
    options.draws_per_node = static_cast<std::size_t>(args.draws_per_node);
    options.seed = config.seed;
    config.params["draws_per_node"] = args.draws_per_node;
    cache.emplace(options);
  }

  // Cell midpoints inside the simplex (and below the diagonal when ranked).
  std::vector<std::pair<double, double>> points;
  const int m = args.grid;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i + j + 1 >= m || (ranked && j >= i)) continue;
      points.emplace_back((i + 0.5) / m, (j + 0.5) / m);
    }
  }
  std::vector<double> density(points.size());
  parallel_for(points.size(), [&](std::size_t idx) {
    const auto [w1, w2] = points[idx];
    if (ranked) {
      density[idx] = prior ? ranked_mixed_density(w1, w2, *prior, *cache) : ranked_joint_density(w1, w2, *args.alpha, *cache);
    } else {
      density[idx] = prior ? sb_mixed_density(w1, w2, *prior) : sb_joint_density(w1, w2, *args.alpha);
    }
  });

  Table out;
  out.columns = {"w1", "w2", "density"};
  for (std::size_t i = 0; i < points.size(); ++i) {
    out.rows.push_back({points[i].first, points[i].second, density[i]});
  }
  return out;
}

struct SampleArgs {
  std::string target = "jeffreys";
  int n = 0;
  std::string method = "ar";
  std::string proposal = "independence-jeffreys2";
  double scale = 1.0;
  std::int64_t draws = 10000;
};

Table run_sample(const SampleArgs& args, RunConfig& config) {
  if (args.target != "jeffreys") throw InvalidArgument("--target must be jeffreys");
  require_positive_count(args.draws, "--draws");
  config.params = {{"target", args.target}, {"n", args.n}, {"method", args.method}, {"draws", args.draws}};

  RngStream rng(config.seed);
  const auto draws = static_cast<std::size_t>(args.draws);
  JeffreysChain chain;
  if (args.method == "ar") {
    chain = sample_jeffreys_ar(args.n, rng, draws);
  } else if (args.method == "slice") {
    chain = sample_jeffreys_slice(args.n, rng, draws);
  } else if (args.method == "mh") {
    const MhProposal proposal = parse_mh_proposal(args.proposal);
    if (!(args.scale > 0.0) || !std::isfinite(args.scale)) throw InvalidArgument("--scale must be > 0");
    config.params["proposal"] = to_string(proposal);
    config.params["scale"] = args.scale;
    chain = sample_jeffreys_mh(args.n, rng, proposal, draws, MhOptions{.scale = args.scale});
  } else {
    throw InvalidArgument("--method must be ar, slice or mh");
  }

  Table out;
  out.columns = {"iteration", "alpha"};
  for (std::size_t i = 0; i < chain.draws.size(); ++i) {
    out.rows.push_back({static_cast<std::int64_t>(i), chain.draws[i]});
  }
  out.trailer["diagnostics"] = {{"acceptance_rate", chain.diagnostics.acceptance_rate},
                                {"iat", chain.diagnostics.iat},
                                {"proposals", chain.diagnostics.proposals}};
  return out;
}

struct CrpArgs {
  int n = 0;
  double alpha = 1.0;
  std::int64_t draws = 100000;
};

Table run_crp(const CrpArgs& args, RunConfig& config) {
  require_positive_count(args.draws, "--draws");
  if (args.n < 1) throw InvalidArgument("crp: n must be >= 1");
  config.params = {{"n", args.n}, {"alpha", args.alpha}, {"draws", args.draws}};
  const auto table = shared_stirling_table(args.n);
  const KnPmf exact = kn_pmf_given_alpha(args.n, args.alpha, *table);

  RngStream rng(config.seed);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(args.n), 0);
  for (std::int64_t d = 0; d < args.draws; ++d) ++counts[static_cast<std::size_t>(sample_crp_kn(args.n, args.alpha, rng) - 1)];

  Table out;
  out.n_max = table->n_max();
  out.columns = {"k", "count", "frequency", "exact", "std_error"};
  const double total = static_cast<double>(args.draws);
  for (int k = 1; k <= args.n; ++k) {
    const double p = exact.at(k);
    out.rows.push_back({std::int64_t{k}, counts[k - 1], counts[k - 1] / total, p, std::sqrt(p * (1 - p) / total)});
  }
  return out;
}

std::string format_name(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "json"; }

}  // namespace

nlohmann::json to_json(const RunConfig& config) {
  return {{"subcommand", config.subcommand},
          {"params", config.params},
          {"seed", config.seed},
          {"format", format_name(config.format)},
          {"output", config.output.empty() ? "-" : config.output}};
}

std::uint64_t default_seed() {
  const char* env = std::getenv("DPPRIOR_SEED");
  if (env == nullptr || *env == '\0') return 0;
  std::uint64_t seed = 0;
  const std::string_view s(env);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InvalidArgument("DPPRIOR_SEED must be an unsigned 64-bit integer, got '" + std::string(s) + "'");
  }
  return seed;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Priors for the Dirichlet-process precision parameter", "dpprior"};
  app.set_version_flag("--version", DPPRIOR_VERSION);
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 0;
  std::string format;
  std::string output;
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed (default $DPPRIOR_SEED, else 0)");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("-o,--output", output, "write to this file instead of stdout");

  DoroArgs doro;
  auto* doro_cmd = app.add_subcommand("doro", "Ga(a, b) whose induced p(Kn) is closest to a target pmf");
  doro_cmd->add_option("--n", doro.n, "sample sizes: 5,10 or 5:100:5")->required()->delimiter(',');
  doro_cmd->add_option("--target", doro.target, "uniform, or a file of n probabilities");
  doro_cmd->add_option("--kl-direction", doro.direction, "target-to-induced or induced-to-target");

  ScalArgs scal;
  auto* scal_cmd = app.add_subcommand("scal", "Ga(a, b) matching p(Kn = 1) and p(Kn >= c)");
  scal_cmd->add_option("--n", scal.n, "sample sizes")->required()->delimiter(',');
  scal_cmd->add_option("--p1", scal.p1, "target p(Kn = 1)");
  scal_cmd->add_option("--tail", scal.tail, "target p(Kn >= ceil(c0 log n))");
  scal_cmd->add_option("--c0", scal.c0, "cutoff multiplier");
  scal_cmd->add_flag("--approx", scal.approx, "use a = b = exp(-0.033 n)");

  ElicitArgs elicit_args;
  auto* elicit_cmd = app.add_subcommand("elicit", "prior on alpha matching probabilities of alpha ranges");
  elicit_cmd->add_option("--family", elicit_args.family, "gamma, exponential, lognormal, half_cauchy")->required();
  elicit_cmd->add_option("--thresholds", elicit_args.thresholds, "increasing alpha thresholds t1 < t2 < ...")->required()->delimiter(',');
  elicit_cmd->add_option("--probs", elicit_args.probs, "p(alpha <= t1), p(t1 < alpha <= t2), ..., summing to 1; fractions allowed")
      ->required()
      ->delimiter(',');

  KnArgs kn;
  double kn_alpha = 0.0;
  auto* kn_cmd = app.add_subcommand("kn", "pmf of the number of clusters Kn");
  kn_cmd->add_option("--n", kn.n, "sample size")->required();
  auto* kn_alpha_opt = kn_cmd->add_option("--alpha", kn_alpha, "fixed alpha");
  auto* kn_prior_opt = kn_cmd->add_option("--prior", kn.prior, "prior as JSON or a bare family name");
  kn_alpha_opt->excludes(kn_prior_opt);

  GridArgs grid;
  double grid_alpha = 0.0;
  auto* grid_cmd = app.add_subcommand("weights-grid", "density of (w1, w2) on a grid of cell midpoints");
  grid_cmd->add_option("--mode", grid.mode, "sb (size-biased) or ranked")->required();
  auto* grid_alpha_opt = grid_cmd->add_option("--alpha", grid_alpha, "fixed alpha");
  auto* grid_prior_opt = grid_cmd->add_option("--prior", grid.prior, "prior as JSON or a bare family name");
  grid_alpha_opt->excludes(grid_prior_opt);
  grid_cmd->add_option("--grid", grid.grid, "cells per axis");
  grid_cmd->add_option("--draws-per-node", grid.draws_per_node, "Monte-Carlo draws per F_alpha node (ranked)");

  SampleArgs sample;
  auto* sample_cmd = app.add_subcommand("sample", "draws from the Jeffreys prior");
  sample_cmd->add_option("--target", sample.target, "jeffreys");
  sample_cmd->add_option("--n", sample.n, "sample size of the Jeffreys prior")->required();
  sample_cmd->add_option("--method", sample.method, "ar, slice or mh");
  sample_cmd->add_option("--proposal", sample.proposal, "independence-jeffreys2, rw-half-cauchy or rw-normal");
  sample_cmd->add_option("--scale", sample.scale, "random-walk scale");
  sample_cmd->add_option("--draws", sample.draws, "number of draws");

  CrpArgs crp;
  auto* crp_cmd = app.add_subcommand("crp", "simulated Kn frequencies against the exact pmf");
  crp_cmd->add_option("--n", crp.n, "sample size")->required();
  crp_cmd->add_option("--alpha", crp.alpha, "alpha")->required();
  crp_cmd->add_option("--draws", crp.draws, "number of simulations");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    RunConfig config;
    config.seed = *seed_opt ? seed : default_seed();
    config.output = output;

    Table table;
    if (doro_cmd->parsed()) {
      config.subcommand = "doro";
      table = run_doro(doro, config);
    } else if (scal_cmd->parsed()) {
      config.subcommand = "scal";
      table = run_scal(scal, config);
    } else if (elicit_cmd->parsed()) {
      config.subcommand = "elicit";
      table = run_elicit(elicit_args, config);
    } else if (kn_cmd->parsed()) {
      config.subcommand = "kn";
      if (*kn_alpha_opt) kn.alpha = kn_alpha;
      if (!kn.alpha && kn.prior.empty()) throw InvalidArgument("kn: pass --alpha or --prior");
      table = run_kn(kn, config);
    } else if (grid_cmd->parsed()) {
      config.subcommand = "weights-grid";
      if (*grid_alpha_opt) grid.alpha = grid_alpha;
      if (!grid.alpha && grid.prior.empty()) throw InvalidArgument("weights-grid: pass --alpha or --prior");
      table = run_weights_grid(grid, config);
    } else if (sample_cmd->parsed()) {
      config.subcommand = "sample";
      table = run_sample(sample, config);
    } else {
      config.subcommand = "crp";
      table = run_crp(crp, config);
    }
    // elicit answers with a JSON object unless CSV is asked for.
    config.format = format.empty() ? (config.subcommand == "elicit" ? OutputFormat::Json : OutputFormat::Csv)
                                   : (format == "json" ? OutputFormat::Json : OutputFormat::Csv);

    // Render fully before touching the destination so failures leave no partial file.
    std::ostringstream rendered;
    write_table(table, config, rendered);
    if (config.output.empty()) {
      out << rendered.str();
    } else {
      std::ofstream file(config.output, std::ios::binary);
      if (!file) throw InvalidArgument("cannot open output file '" + config.output + "'");
      file << rendered.str();
      if (!file) throw InvalidArgument("failed writing '" + config.output + "'");
    }
    return kExitOk;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UnsupportedPrior& e) {
    err << "unsupported prior: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const InfeasibleTargets& e) {
    err << "infeasible targets: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const ConvergenceError& e) {
    err << "solver failed: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace dpprior
