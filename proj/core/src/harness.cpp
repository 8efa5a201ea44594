#include "rrt/harness.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>

#include "json.hpp"
#include "rrt/conditional_laws.hpp"
#include "rrt/error.hpp"
#include "rrt/format.hpp"
#include "rrt/limits.hpp"
#include "rrt/parallel.hpp"
#include "rrt/stats.hpp"

#ifndef RRT_VERSION
#define RRT_VERSION "unknown"
#endif

namespace rrt {

namespace {

using nlohmann::ordered_json;

constexpr std::array<std::pair<Experiment, std::string_view>, 9> kNames{{
    {Experiment::depth_law, "depth-law"},
    {Experiment::depth_exact_check, "depth-exact-check"},
    {Experiment::arcsine, "arcsine"},
    {Experiment::outdeg_profile, "outdeg-profile"},
    {Experiment::scaling, "scaling"},
    {Experiment::subcritical, "subcritical"},
    {Experiment::texpect, "texpect"},
    {Experiment::sanity, "sanity"},
    {Experiment::bench, "bench"},
}};

const std::set<std::string> kKnownKeys{
    "experiment",     "seed",          "n",           "n_grid",     "reps",       "threads",
    "out",            "tolerance",     "tolerance_last", "rho",     "t_grid",     "j_list",
    "window",         "alpha_level",   "env.model",   "env.alpha",  "env.weights", "env.lo",
    "env.hi",         "env.mean",      "increment.kind", "increment.sigma", "increment.p0", "increment.alpha",
    "increment.beta", "edge.kind",     "edge.c",      "edge.mean",
};

std::string get(const ConfigMap& m, const std::string& key, const std::string& fallback) {
  const auto it = m.find(key);
  return it == m.end() ? fallback : it->second;
}

std::vector<std::size_t> parse_counts(const std::string& text, const std::string& key) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(text)) out.push_back(parse_count(item, key));
  return out;
}

std::vector<double> parse_reals(const std::string& text, const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_real(item, key));
  return out;
}

std::string join(const auto& values) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += ',';
    if constexpr (std::is_floating_point_v<std::decay_t<decltype(v)>>)
      out += format_double(v);
    else
      out += std::to_string(v);
  }
  return out;
}

struct Defaults {
  std::size_t n;
  std::size_t reps;
  double tolerance;
  const char* env;
};

Defaults defaults_for(Experiment e) {
  switch (e) {
    case Experiment::depth_law: return {10000, 10000, 0.05, "product_form"};
    case Experiment::depth_exact_check: return {200, 100000, 0.0, "product_form"};
    case Experiment::arcsine: return {10000, 10000, 0.03, "product_form"};
    case Experiment::outdeg_profile: return {10000, 10000, 0.10, "product_form"};
    case Experiment::scaling: return {100000, 10000, 0.05, "product_form"};
    case Experiment::subcritical: return {10000, 1, 0.01, "power"};
    case Experiment::texpect: return {10000, 10000, 0.05, "product_form"};
    case Experiment::sanity: return {1000, 10, 1e-10, "constant"};
    case Experiment::bench: return {1000000, 3, 2.0, "product_form"};
  }
  throw UsageError("unknown experiment");
}

EnvChoice parse_env(const ConfigMap& m, const char* fallback, Experiment e) {
  EnvChoice env;
  const std::string model = get(m, "env.model", fallback);
  if (model == "constant") {
    env.kind = EnvKind::constant;
  } else if (model == "power") {
    env.kind = EnvKind::power;
    env.alpha = parse_real(get(m, "env.alpha", e == Experiment::subcritical ? "-2" : "1"), "env.alpha");
  } else if (model == "stretched_exp") {
    env.kind = EnvKind::stretched_exp;
    env.alpha = parse_real(get(m, "env.alpha", "0.5"), "env.alpha");
  } else if (model == "product_form") {
    env.kind = EnvKind::product_form;
  } else if (model == "iid") {
    env.kind = EnvKind::iid_weights;
    const std::string w = get(m, "env.weights", "uniform");
    if (w == "uniform")
      env.weights = UniformWeightDist{parse_real(get(m, "env.lo", "0"), "env.lo"),
                                      parse_real(get(m, "env.hi", "2"), "env.hi")};
    else if (w == "exponential")
      env.weights = ExponentialWeightDist{parse_real(get(m, "env.mean", "1"), "env.mean")};
    else
      throw ConfigError("env.weights must be uniform or exponential");
  } else {
    throw ConfigError("unknown env.model '" + model + "'");
  }
  return env;
}

IncrementSpec parse_increment(const ConfigMap& m) {
  const std::string kind = get(m, "increment.kind", "gaussian");
  IncrementSpec spec;
  if (kind == "gaussian")
    spec = Gaussian{parse_real(get(m, "increment.sigma", "1"), "increment.sigma")};
  else if (kind == "rademacher")
    spec = Rademacher{};
  else if (kind == "lattice_with_atom")
    spec = LatticeWithAtom{parse_real(get(m, "increment.p0", "0"), "increment.p0")};
  else if (kind == "stable")
    spec = Stable{parse_real(get(m, "increment.alpha", "1.5"), "increment.alpha"),
                  parse_real(get(m, "increment.beta", "0"), "increment.beta")};
  else
    throw ConfigError("unknown increment.kind '" + kind + "'");
  validate(spec);
  return spec;
}

EdgeLenSpec parse_edge(const ConfigMap& m) {
  const std::string kind = get(m, "edge.kind", "unit");
  EdgeLenSpec lens;
  if (kind == "unit")
    lens = UnitLength{};
  else if (kind == "deterministic")
    lens = DeterministicLength{parse_real(get(m, "edge.c", "1"), "edge.c")};
  else if (kind == "exponential")
    lens = ExponentialLength{parse_real(get(m, "edge.mean", "1"), "edge.mean")};
  else
    throw ConfigError("unknown edge.kind '" + kind + "'");
  validate(lens);
  return lens;
}

Environment sample_env(const ExperimentConfig& c, std::size_t n, Rng& rng) {
  switch (c.env.kind) {
    case EnvKind::constant: return build_environment(ConstantWeights{}, n);
    case EnvKind::power: return build_environment(PowerWeights{c.env.alpha}, n);
    case EnvKind::stretched_exp: return build_environment(StretchedExpWeights{c.env.alpha}, n);
    case EnvKind::product_form: return build_environment(ProductFormWeights{sample_path(c.increment, n, rng)}, n);
    case EnvKind::iid_weights: return build_environment(IidWeights{c.env.weights, rng()}, n);
    case EnvKind::custom: break;
  }
  throw ConfigError("unsupported environment model");
}

void require_product_form(const ExperimentConfig& c) {
  if (c.env.kind != EnvKind::product_form)
    throw ConfigError(std::string(experiment_name(c.experiment)) + " needs env.model = product_form");
}

Check make_check(std::string name, double value, double lower, double upper) {
  Check check{std::move(name), value, lower, upper, false};
  check.passed = std::isfinite(value) && value >= lower && value <= upper;
  return check;
}

std::vector<double> iota_column(std::size_t count) {
  std::vector<double> out(count);
  std::iota(out.begin(), out.end(), 0.0);
  return out;
}

// Positivity parameter: configured, 1/2 by symmetry, or estimated.
double resolve_rho(const ExperimentConfig& c, ordered_json& diag) {
  if (c.rho) {
    diag["rho_source"] = "config";
    return *c.rho;
  }
  if (is_symmetric(c.increment)) {
    diag["rho_source"] = "symmetry";
    return 0.5;
  }
  const ProportionEstimate est = estimate_rho(c.increment, c.n, c.reps, derive_seed(c.seed, 1), c.threads);
  diag["rho_source"] = "estimated";
  diag["rho_lower_99"] = est.lower;
  diag["rho_upper_99"] = est.upper;
  return est.value;
}

struct Outcome {
  std::string claim;
  ResultTable table;
  std::vector<Check> checks;
  ordered_json diag = ordered_json::object();
};

Outcome run_depth_law(const ExperimentConfig& c) {
  require_product_form(c);
  Outcome o;
  o.claim =
      "Over random product-form environments the depth of the newest vertex, scaled by sigma_m sqrt(n) E Y, "
      "converges in law to the maximum of standard Brownian motion on [0, 1].";
  const SigmaEstimate sig = estimate_sigma_m(c.increment, c.n, c.reps, derive_seed(c.seed, 1), c.threads);
  const double root_n = std::sqrt(static_cast<double>(c.n));
  const double scale = sig.sigma_m * root_n * edge_mean(c.edge);
  std::vector<double> depth(c.reps), low(c.reps), zeta_n(c.reps), scaled(c.reps);
  parallel_for(c.reps, c.threads, [&](std::size_t i) {
    Rng rng(derive_seed(c.seed, 2), i);
    const Environment env = build_environment(ProductFormWeights{sample_path(c.increment, c.n, rng)}, c.n);
    depth[i] = depth_sample_fast(env, c.edge, c.n, rng);
    const auto logw = env.log_weights();
    low[i] = -*std::max_element(logw.begin(), logw.end());
    zeta_n[i] = zeta(env, c.n, root_n);
    scaled[i] = depth[i] / scale;
  });
  const double ks = ks_distance(EmpiricalDist(scaled), max_bm_cdf);
  o.checks.push_back(make_check("ks_scaled_depth_vs_max_bm", ks, 0.0, c.tolerance));
  o.diag["sigma_m"] = sig.sigma_m;
  o.diag["sigma_m_lower_95"] = sig.lower;
  o.diag["sigma_m_upper_95"] = sig.upper;
  o.diag["sigma_m_q25"] = sigma_at_quantile(sig.zeta, 0.25);
  o.diag["sigma_m_q75"] = sigma_at_quantile(sig.zeta, 0.75);
  o.diag["edge_mean"] = edge_mean(c.edge);
  o.diag["ks_critical_1pct"] = kolmogorov_critical_value(c.reps, 0.01);
  o.table.add_column("replicate", iota_column(c.reps));
  o.table.add_column("D_n", std::move(depth));
  o.table.add_column("L_n", std::move(low));
  o.table.add_column("zeta_n", std::move(zeta_n));
  o.table.add_column("scaled_depth", std::move(scaled));
  return o;
}

Outcome run_depth_exact_check(const ExperimentConfig& c) {
  if (!is_unit(c.edge)) throw ConfigError("depth-exact-check needs unit edge lengths");
  Outcome o;
  o.claim =
      "Given the environment, the depth of the newest vertex is one plus a sum of independent Bernoulli(p_j(j)) "
      "indicators and each outdegree is a sum of independent Bernoulli(p_{k-1}(j)) indicators; tree-grown samples "
      "must match these exact laws.";
  std::vector<std::size_t> js = c.j_list;
  if (js.empty()) js = {0, c.n / 2, c.n - 1};
  for (std::size_t j : js)
    if (j > c.n) throw ConfigError("j_list entries must not exceed n");
  Rng env_rng(derive_seed(c.seed, 1), 0);
  const Environment env = sample_env(c, c.n, env_rng);
  std::vector<double> depth(c.reps);
  std::vector<std::vector<double>> outdeg(js.size(), std::vector<double>(c.reps));
  parallel_for(c.reps, c.threads, [&](std::size_t i) {
    Rng rng(derive_seed(c.seed, 2), i);
    const TreeStats stats = tree_stats(grow(env, c.edge, c.n, rng));
    depth[i] = stats.depths[c.n];
    for (std::size_t q = 0; q < js.size(); ++q) outdeg[q][i] = static_cast<double>(stats.outdegrees[js[q]]);
  });
  const double crit = kolmogorov_critical_value(c.reps, c.alpha_level);
  o.diag["ks_critical"] = crit;
  o.diag["alpha_level"] = c.alpha_level;
  o.checks.push_back(make_check("ks_depth_vs_exact", ks_distance_discrete(EmpiricalDist(depth), exact_depth_pmf(env, c.n)),
                                0.0, crit));
  o.table.add_column("replicate", iota_column(c.reps));
  o.table.add_column("D_n", std::move(depth));
  for (std::size_t q = 0; q < js.size(); ++q) {
    const std::string name = "N_" + std::to_string(js[q]);
    const Pmf exact = exact_outdeg_pmf(env, c.n, js[q]);
    o.checks.push_back(make_check("ks_" + name + "_vs_exact", ks_distance_discrete(EmpiricalDist(outdeg[q]), exact),
                                  0.0, crit));
    o.table.add_column(name, std::move(outdeg[q]));
  }
  return o;
}

Outcome run_arcsine(const ExperimentConfig& c) {
  Outcome o;
  o.claim =
      "Under Spitzer's condition the leftmost time of the minimum, divided by n, follows the generalized arcsine "
      "law. The minimum time is governed by the index 1 - rho, where rho = lim P(S_n > 0).";
  const double rho = resolve_rho(c, o.diag);
  const double index = 1.0 - rho;
  std::vector<double> tau(c.reps), x(c.reps);
  parallel_for(c.reps, c.threads, [&](std::size_t i) {
    Rng rng(derive_seed(c.seed, 2), i);
    tau[i] = static_cast<double>(argmin_leftmost(sample_path(c.increment, c.n, rng)));
    x[i] = tau[i] / static_cast<double>(c.n);
  });
  const EmpiricalDist emp(x);
  const double ks = ks_distance(emp, [index](double v) { return arcsine_cdf(std::clamp(v, 0.0, 1.0), index); });
  const double ks_literal = ks_distance(emp, [rho](double v) { return arcsine_cdf(std::clamp(v, 0.0, 1.0), rho); });
  o.checks.push_back(make_check("ks_tau_over_n_vs_arcsine", ks, 0.0, c.tolerance));
  o.diag["rho"] = rho;
  o.diag["law_index"] = index;
  o.diag["ks_with_index_rho"] = ks_literal;
  const auto at_end = std::count(emp.sorted().begin(), emp.sorted().end(), 1.0);
  o.diag["fraction_at_n"] = static_cast<double>(at_end) / static_cast<double>(emp.size());
  o.table.metadata["law_index"] = format_double(index);
  o.table.add_column("replicate", iota_column(c.reps));
  o.table.add_column("tau", std::move(tau));
  o.table.add_column("x", std::move(x));
  return o;
}

Outcome run_outdeg_profile(const ExperimentConfig& c) {
  Outcome o;
  std::vector<double> ts = c.t_grid.empty() ? std::vector<double>{0.2, 0.5, 0.8} : c.t_grid;
  for (double t : ts)
    if (!(t > 0.0 && t < 1.0)) throw ConfigError("t_grid entries must lie in (0, 1)");
  const double nd = static_cast<double>(c.n);
  std::vector<double> col_t, col_j, col_mean, col_se, col_limit, col_point, col_point_se, col_point_limit;

  if (c.env.kind == EnvKind::constant) {
    o.claim = "With constant weights the mean outdegree of vertex floor(nt) tends to -ln t.";
    const Environment env = build_environment(ConstantWeights{}, c.n);
    const OutdegreeMeans means(env, c.n);
    for (double t : ts) {
      const auto j = static_cast<std::size_t>(std::floor(nd * t));
      const double value = means(j);
      const double limit = constant_weight_profile(t);
      col_t.push_back(t);
      col_j.push_back(static_cast<double>(j));
      col_mean.push_back(value);
      col_se.push_back(0.0);
      col_limit.push_back(limit);
      col_point.push_back(value);
      col_point_se.push_back(0.0);
      col_point_limit.push_back(limit);
      o.checks.push_back(make_check("relative_error_t_" + format_short(t), std::abs(value / limit - 1.0), 0.0,
                                    c.tolerance));
    }
  } else {
    require_product_form(c);
    o.claim =
        "Over random product-form environments the annealed mean outdegree of vertex floor(nt) tends to "
        "(sin(pi rho)/(pi rho)) ((1-t)/t)^rho. Means are taken over a window of labels around floor(nt) and "
        "compared with the profile averaged over the same window.";
    const double rho = resolve_rho(c, o.diag);
    o.diag["rho"] = rho;
    const auto half = static_cast<std::size_t>(std::floor(c.window * nd));
    o.diag["window_half_width"] = static_cast<double>(half);
    struct Window {
      std::size_t centre, lo, hi;
    };
    std::vector<Window> windows;
    for (double t : ts) {
      const auto j = static_cast<std::size_t>(std::floor(nd * t));
      const std::size_t lo = std::max<std::size_t>(1, j > half ? j - half : 1);
      const std::size_t hi = std::min(c.n - 1, j + half);
      windows.push_back({j, lo, hi});
    }
    std::vector<std::vector<double>> point(ts.size(), std::vector<double>(c.reps));
    std::vector<std::vector<double>> window_mean(ts.size(), std::vector<double>(c.reps));
    parallel_for(c.reps, c.threads, [&](std::size_t i) {
      Rng rng(derive_seed(c.seed, 2), i);
      const Environment env = sample_env(c, c.n, rng);
      const OutdegreeMeans means(env, c.n);
      for (std::size_t q = 0; q < ts.size(); ++q) {
        point[q][i] = means(windows[q].centre);
        long double acc = 0.0L;
        for (std::size_t j = windows[q].lo; j <= windows[q].hi; ++j) acc += means(j);
        window_mean[q][i] = static_cast<double>(acc / static_cast<long double>(windows[q].hi - windows[q].lo + 1));
      }
    });
    for (std::size_t q = 0; q < ts.size(); ++q) {
      const Window& w = windows[q];
      long double acc = 0.0L;
      for (std::size_t j = w.lo; j <= w.hi; ++j) acc += outdeg_profile(static_cast<double>(j) / nd, rho);
      const double limit = static_cast<double>(acc / static_cast<long double>(w.hi - w.lo + 1));
      const MeanCi win = mean_with_ci(window_mean[q], 0.6826894921370859);
      const MeanCi pt = mean_with_ci(point[q], 0.6826894921370859);
      col_t.push_back(ts[q]);
      col_j.push_back(static_cast<double>(w.centre));
      col_mean.push_back(win.mean);
      col_se.push_back(win.half_width);
      col_limit.push_back(limit);
      col_point.push_back(pt.mean);
      col_point_se.push_back(pt.half_width);
      col_point_limit.push_back(outdeg_profile(ts[q], rho));
      o.checks.push_back(make_check("relative_error_t_" + format_short(ts[q]), std::abs(win.mean / limit - 1.0), 0.0,
                                    c.tolerance));
    }
  }
  o.table.add_column("t", std::move(col_t));
  o.table.add_column("j", std::move(col_j));
  o.table.add_column("mean_estimate", std::move(col_mean));
  o.table.add_column("stderr", std::move(col_se));
  o.table.add_column("limit", std::move(col_limit));
  o.table.add_column("point_mean", std::move(col_point));
  o.table.add_column("point_stderr", std::move(col_point_se));
  o.table.add_column("point_limit", std::move(col_point_limit));
  return o;
}

Outcome run_scaling(const ExperimentConfig& c) {
  require_product_form(c);
  Outcome o;
  o.claim =
      "Under Spitzer's condition the annealed mean outdegree of the root grows like n^rho and that of vertex n-1 "
      "decays like n^-rho. Only the exponents are checked; the constants are not.";
  std::vector<std::size_t> grid = c.n_grid.empty() ? std::vector<std::size_t>{1000, 3000, 10000, 30000, 100000} : c.n_grid;
  std::sort(grid.begin(), grid.end());
  if (grid.size() < 2 || grid.front() < 2) throw ConfigError("scaling needs at least two grid sizes >= 2");
  const double rho = resolve_rho(c, o.diag);
  const std::size_t nmax = grid.back();
  std::vector<std::vector<double>> root(grid.size(), std::vector<double>(c.reps));
  std::vector<std::vector<double>> last(grid.size(), std::vector<double>(c.reps));
  // Each environment is reused along the whole grid (common random numbers).
  parallel_for(c.reps, c.threads, [&](std::size_t i) {
    Rng rng(derive_seed(c.seed, 2), i);
    const Environment env = sample_env(c, nmax, rng);
    long double inv_mass = 0.0L;
    std::size_t g = 0;
    for (std::size_t k = 0; k < nmax && g < grid.size(); ++k) {
      inv_mass += std::exp(-env.log_prefix_mass(k));
      if (k + 1 == grid[g]) {
        root[g][i] = static_cast<double>(inv_mass);
        last[g][i] = std::exp(env.log_weight(k) - env.log_prefix_mass(k));
        ++g;
      }
    }
  });
  std::vector<double> ns, root_mean, root_se, last_mean, last_se;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const MeanCi r = mean_with_ci(root[g], 0.6826894921370859);
    const MeanCi l = mean_with_ci(last[g], 0.6826894921370859);
    ns.push_back(static_cast<double>(grid[g]));
    root_mean.push_back(r.mean);
    root_se.push_back(r.half_width);
    last_mean.push_back(l.mean);
    last_se.push_back(l.half_width);
  }
  const FitReport fit_root = loglog_slope(ns, root_mean);
  const FitReport fit_last = loglog_slope(ns, last_mean);
  o.checks.push_back(make_check("slope_root_outdegree", fit_root.slope, rho - c.tolerance, rho + c.tolerance));
  o.checks.push_back(
      make_check("slope_last_outdegree", fit_last.slope, -rho - c.tolerance_last, -rho + c.tolerance_last));
  o.diag["rho"] = rho;
  o.diag["slope_root_stderr"] = fit_root.slope_stderr;
  o.diag["slope_last_stderr"] = fit_last.slope_stderr;
  o.table.add_column("n", std::move(ns));
  o.table.add_column("mean_root_outdegree", std::move(root_mean));
  o.table.add_column("stderr_root_outdegree", std::move(root_se));
  o.table.add_column("mean_last_outdegree", std::move(last_mean));
  o.table.add_column("stderr_last_outdegree", std::move(last_se));
  return o;
}

Outcome run_subcritical(const ExperimentConfig& c) {
  Outcome o;
  o.claim =
      "When sum p_j(j) converges the quenched law of the depth has a weak limit; exact laws at two sizes must be "
      "close in total variation.";
  std::vector<std::size_t> grid = c.n_grid.empty() ? std::vector<std::size_t>{1000, c.n} : c.n_grid;
  std::sort(grid.begin(), grid.end());
  if (grid.size() != 2 || grid[0] == 0) throw ConfigError("subcritical needs n_grid with two positive sizes");
  Rng env_rng(derive_seed(c.seed, 1), 0);
  const Environment env = sample_env(c, grid[1], env_rng);
  const Pmf small = exact_depth_pmf(env, grid[0]);
  const Pmf large = exact_depth_pmf(env, grid[1]);
  const double tv = tv_distance(small, large);
  o.checks.push_back(make_check("tv_depth_laws", tv, 0.0, c.tolerance));
  long double tail = 0.0L;
  for (std::size_t j = grid[0]; j < grid[1]; ++j) tail += std::exp(env.log_weight(j) - env.log_prefix_mass(j));
  o.diag["self_prob_tail_sum"] = static_cast<double>(tail);
  std::vector<double> depth(large.size()), mass_small(large.size(), 0.0), mass_large(large.mass().begin(), large.mass().end());
  for (std::size_t k = 0; k < large.size(); ++k) depth[k] = large.support()[k];
  // Both supports start at 1, so the smaller law is a prefix of the larger one.
  std::copy(small.mass().begin(), small.mass().end(), mass_small.begin());
  o.table.add_column("depth", std::move(depth));
  o.table.add_column("mass_n" + std::to_string(grid[0]), std::move(mass_small));
  o.table.add_column("mass_n" + std::to_string(grid[1]), std::move(mass_large));
  return o;
}

Outcome run_texpect(const ExperimentConfig& c) {
  require_product_form(c);
  Outcome o;
  o.claim =
      "For j near the time of the minimum, exp(S_j - S_tau) E_w N_n(j) / (n - j) has the same limit law as "
      "1 / sum_k exp(S_tau - S_k); samples of both must agree.";
  if (c.n < 1) throw ConfigError("texpect needs n >= 1");
  std::vector<double> tau(c.reps), js(c.reps), stat(c.reps), eta(c.reps), envelope_ok(c.reps);
  parallel_for(c.reps, c.threads, [&](std::size_t i) {
    Rng rng(derive_seed(c.seed, 1), i);
    const WalkPath path = sample_path(c.increment, c.n, rng);
    const Environment env = build_environment(ProductFormWeights{path}, c.n);
    const std::size_t t = env_argmin_time(env, c.n);
    const std::size_t j = std::min(t, c.n - 1);
    tau[i] = static_cast<double>(t);
    js[i] = static_cast<double>(j);
    stat[i] = texpect_statistic(env, c.n, j);
    envelope_ok[i] = 1.0;
    if (j == t) {
      const double lo = eta_sum_statistic(path, c.n);
      const double hi = eta_prefix_statistic(path, c.n);
      envelope_ok[i] = (stat[i] >= lo * (1.0 - 1e-12) && stat[i] <= hi * (1.0 + 1e-12)) ? 1.0 : 0.0;
    }
    Rng ref(derive_seed(c.seed, 2), i);
    eta[i] = eta_sum_statistic(sample_path(c.increment, c.n, ref), c.n);
  });
  const double ks = ks_two_sample(EmpiricalDist(stat), EmpiricalDist(eta));
  const double violations = static_cast<double>(c.reps) - std::accumulate(envelope_ok.begin(), envelope_ok.end(), 0.0);
  o.checks.push_back(make_check("ks_texpect_vs_eta_sum", ks, 0.0, c.tolerance));
  o.checks.push_back(make_check("envelope_violations", violations, 0.0, 0.0));
  o.diag["ks_two_sample_critical_1pct"] =
      kolmogorov_critical_value(c.reps, 0.01) * std::sqrt(2.0);
  o.table.add_column("replicate", iota_column(c.reps));
  o.table.add_column("tau", std::move(tau));
  o.table.add_column("j", std::move(js));
  o.table.add_column("texpect", std::move(stat));
  o.table.add_column("eta_sum", std::move(eta));
  return o;
}

Outcome run_sanity(const ExperimentConfig& c) {
  Outcome o;
  o.claim =
      "Exact identities: attachment probabilities sum to one, mean outdegrees sum to n, the exact depth law has "
      "mean 1 + sum p_j(j), and with constant weights E D_n = E_w N_n(0) = H_n.";
  Rng env_rng(derive_seed(c.seed, 1), 0);
  const Environment env = sample_env(c, c.n, env_rng);
  std::vector<std::string> names;
  std::vector<double> values, bounds;
  auto add = [&](std::string name, double value, double bound) {
    o.checks.push_back(make_check(name, value, 0.0, bound));
    names.push_back(std::move(name));
    values.push_back(value);
    bounds.push_back(bound);
  };

  double worst = 0.0;
  for (std::size_t r = 0; r <= c.n; ++r) {
    long double sum = 0.0L;
    for (std::size_t j = 0; j <= r; ++j) sum += attach_prob(env, r, j);
    worst = std::max(worst, static_cast<double>(std::abs(sum - 1.0L)));
  }
  add("max_normalization_error", worst, 1e-12);

  const OutdegreeMeans means(env, c.n);
  long double mean_total = 0.0L;
  for (std::size_t j = 0; j < c.n; ++j) mean_total += means(j);
  add("mean_outdegree_total_error", static_cast<double>(std::abs(mean_total - static_cast<long double>(c.n))), 1e-9);

  const Pmf depth = exact_depth_pmf(env, c.n);
  long double expected_depth = c.n == 0 ? 0.0L : 1.0L;
  for (double p : self_prob_seq(env, c.n == 0 ? 0 : c.n - 1)) expected_depth += p;
  add("depth_pmf_mean_error", static_cast<double>(std::abs(static_cast<long double>(depth.mean()) - expected_depth)),
      1e-9);

  if (c.env.kind == EnvKind::constant) {
    long double harmonic = 0.0L;
    for (std::size_t k = 1; k <= c.n; ++k) harmonic += 1.0L / static_cast<long double>(k);
    add("depth_mean_vs_harmonic", static_cast<double>(std::abs(static_cast<long double>(depth.mean()) - harmonic)),
        c.tolerance);
    add("root_outdegree_vs_harmonic", static_cast<double>(std::abs(static_cast<long double>(means(0)) - harmonic)),
        c.tolerance);
  }

  std::vector<double> bad(c.reps, 0.0);
  parallel_for(c.reps, c.threads, [&](std::size_t i) {
    Rng rng(derive_seed(c.seed, 2), i);
    const RecursiveTree tree = grow(env, c.edge, c.n, rng);
    for (std::size_t k = 1; k <= tree.size(); ++k)
      if (tree.parent[k] >= k) bad[i] += 1.0;
    const TreeStats stats = tree_stats(tree);
    const std::size_t total = std::accumulate(stats.outdegrees.begin(), stats.outdegrees.end(), std::size_t{0});
    if (total != c.n) bad[i] += 1.0;
  });
  add("tree_structure_violations", std::accumulate(bad.begin(), bad.end(), 0.0), 0.0);

  o.table.add_column("check", std::move(names));
  o.table.add_column("value", std::move(values));
  o.table.add_column("bound", std::move(bounds));
  return o;
}

Outcome run_bench(const ExperimentConfig& c) {
  Outcome o;
  o.claim = "Tree growth throughput, sampler rebuild counts and a memory estimate.";
  std::vector<double> runs, ns, rebuilds, peak;
  double best_seconds = std::numeric_limits<double>::infinity();
  double worst_excess = -std::numeric_limits<double>::infinity();
  std::size_t max_rebuilds = 0;
  // Single-threaded by design: this times one growth engine.
  for (std::size_t i = 0; i < c.reps; ++i) {
    Rng env_rng(derive_seed(c.seed, 1), i);
    const Environment env = sample_env(c, c.n, env_rng);
    const auto logw = env.log_weights();
    const double top = *std::max_element(logw.begin(), logw.end());
    TreeGrower grower(env, c.edge);
    Rng rng(derive_seed(c.seed, 2), i);
    const auto start = std::chrono::steady_clock::now();
    const RecursiveTree tree = grower.grow(c.n, rng);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    best_seconds = std::min(best_seconds, seconds);
    // Every rebuild lifts the offset by more than kMaxLogRange.
    const double allowed = std::floor(top / PrefixSampler::kMaxLogRange) + 1.0;
    worst_excess = std::max(worst_excess, static_cast<double>(grower.rebuild_count()) - allowed);
    max_rebuilds = std::max(max_rebuilds, grower.rebuild_count());
    const double bytes = static_cast<double>(tree.parent.capacity() * sizeof(std::size_t) +
                                             tree.edge_len.capacity() * sizeof(double)) +
                         // sampler: Fenwick array and log weights; environment: two arrays
                         4.0 * static_cast<double>(c.n + 2) * sizeof(double);
    runs.push_back(static_cast<double>(i));
    ns.push_back(static_cast<double>(c.n));
    rebuilds.push_back(static_cast<double>(grower.rebuild_count()));
    peak.push_back(bytes);
  }
  o.checks.push_back(make_check("rebuilds_over_drift_bound", worst_excess, -std::numeric_limits<double>::infinity(), 0.0));
  o.checks.push_back(make_check("max_rebuild_count", static_cast<double>(max_rebuilds), 0.0, 20.0));
  o.checks.push_back(make_check("best_seconds_per_grow", best_seconds, 0.0, c.tolerance));
  o.diag["vertices_per_second"] = static_cast<double>(c.n) / best_seconds;
  o.table.add_column("run", std::move(runs));
  o.table.add_column("n", std::move(ns));
  o.table.add_column("rebuild_count", std::move(rebuilds));
  o.table.add_column("peak_bytes", std::move(peak));
  return o;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

Experiment parse_experiment(std::string_view name) {
  for (const auto& [e, n] : kNames)
    if (n == name) return e;
  throw UsageError("unknown experiment '" + std::string(name) + "'");
}

std::string_view experiment_name(Experiment experiment) {
  for (const auto& [e, n] : kNames)
    if (e == experiment) return n;
  return "unknown";
}

ExperimentConfig make_config(const ConfigMap& values) {
  for (const auto& [key, value] : values)
    if (!kKnownKeys.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  if (!values.contains("experiment")) throw UsageError("no experiment given");
  if (!values.contains("seed")) throw ConfigError("seed is mandatory");

  ExperimentConfig c;
  c.experiment = parse_experiment(values.at("experiment"));
  const Defaults d = defaults_for(c.experiment);
  c.seed = parse_count(values.at("seed"), "seed");
  c.n = parse_count(get(values, "n", std::to_string(d.n)), "n");
  c.reps = parse_count(get(values, "reps", std::to_string(d.reps)), "reps");
  c.threads = static_cast<unsigned>(parse_count(get(values, "threads", "1"), "threads"));
  c.out = get(values, "out", "");
  c.tolerance = parse_real(get(values, "tolerance", format_double(d.tolerance)), "tolerance");
  c.tolerance_last = parse_real(get(values, "tolerance_last", "0.1"), "tolerance_last");
  if (values.contains("rho")) c.rho = parse_real(values.at("rho"), "rho");
  if (values.contains("n_grid")) c.n_grid = parse_counts(values.at("n_grid"), "n_grid");
  if (values.contains("t_grid")) c.t_grid = parse_reals(values.at("t_grid"), "t_grid");
  if (values.contains("j_list")) c.j_list = parse_counts(values.at("j_list"), "j_list");
  c.window = parse_real(get(values, "window", "0.05"), "window");
  c.alpha_level = parse_real(get(values, "alpha_level", "0.01"), "alpha_level");
  c.env = parse_env(values, d.env, c.experiment);
  c.increment = parse_increment(values);
  c.edge = parse_edge(values);

  if (c.n < 1) throw ConfigError("n must be at least 1");
  if (c.reps < 1) throw ConfigError("reps must be at least 1");
  if (c.threads < 1) throw ConfigError("threads must be at least 1");
  if (c.rho && !(*c.rho > 0.0 && *c.rho < 1.0)) throw ConfigError("rho must lie in (0, 1)");
  if (!(c.tolerance >= 0.0) || !(c.tolerance_last >= 0.0)) throw ConfigError("tolerances must be nonnegative");
  if (!(c.window >= 0.0 && c.window < 0.5)) throw ConfigError("window must lie in [0, 0.5)");
  if (!(c.alpha_level > 0.0 && c.alpha_level < 1.0)) throw ConfigError("alpha_level must lie in (0, 1)");

  // Echo everything that shapes the output. Threads and out are left out on
  // purpose: they must not change the result.
  c.echo = values;
  c.echo.erase("threads");
  c.echo.erase("out");
  c.echo["n"] = std::to_string(c.n);
  c.echo["reps"] = std::to_string(c.reps);
  c.echo["tolerance"] = format_double(c.tolerance);
  c.echo["env.model"] = get(values, "env.model", d.env);
  if (!c.n_grid.empty()) c.echo["n_grid"] = join(c.n_grid);
  return c;
}

void ResultTable::check_new(const std::string& name, std::size_t length) const {
  if (std::find(names_.begin(), names_.end(), name) != names_.end()) throw DomainError("duplicate column " + name);
  if (!names_.empty() && length != rows_) throw DomainError("column " + name + " has the wrong length");
}

void ResultTable::add_column(std::string name, std::vector<double> values) {
  check_new(name, values.size());
  rows_ = values.size();
  names_.push_back(std::move(name));
  columns_.emplace_back(std::move(values));
}

void ResultTable::add_column(std::string name, std::vector<std::string> values) {
  check_new(name, values.size());
  rows_ = values.size();
  names_.push_back(std::move(name));
  columns_.emplace_back(std::move(values));
}

bool ResultTable::has_column(std::string_view name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

std::span<const double> ResultTable::column(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw DomainError("missing column " + std::string(name));
  const auto* values = std::get_if<std::vector<double>>(&columns_[static_cast<std::size_t>(it - names_.begin())]);
  if (!values) throw DomainError("column " + std::string(name) + " is not numeric");
  return *values;
}

void write_csv(std::ostream& out, const ResultTable& table) {
  for (std::size_t c = 0; c < table.names_.size(); ++c) out << (c ? "," : "") << csv_field(table.names_[c]);
  out << '\n';
  for (std::size_t r = 0; r < table.rows_; ++r) {
    for (std::size_t c = 0; c < table.columns_.size(); ++c) {
      if (c) out << ',';
      std::visit(
          [&](const auto& col) {
            if constexpr (std::is_same_v<std::decay_t<decltype(col)>, std::vector<double>>)
              out << format_double(col[r]);
            else
              out << csv_field(col[r]);
          },
          table.columns_[c]);
    }
    out << '\n';
  }
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  switch (config.experiment) {
    case Experiment::depth_law: o = run_depth_law(config); break;
    case Experiment::depth_exact_check: o = run_depth_exact_check(config); break;
    case Experiment::arcsine: o = run_arcsine(config); break;
    case Experiment::outdeg_profile: o = run_outdeg_profile(config); break;
    case Experiment::scaling: o = run_scaling(config); break;
    case Experiment::subcritical: o = run_subcritical(config); break;
    case Experiment::texpect: o = run_texpect(config); break;
    case Experiment::sanity: o = run_sanity(config); break;
    case Experiment::bench: o = run_bench(config); break;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  ExperimentResult result;
  result.passed = std::all_of(o.checks.begin(), o.checks.end(), [](const Check& ch) { return ch.passed; });
  ordered_json summary;
  summary["experiment"] = std::string(experiment_name(config.experiment));
  summary["claim"] = o.claim;
  summary["version"] = RRT_VERSION;
  summary["config"] = config.echo;
  summary["checks"] = ordered_json::array();
  for (const Check& ch : o.checks) {
    ordered_json j;
    j["name"] = ch.name;
    j["value"] = ch.value;
    j["lower"] = std::isfinite(ch.lower) ? ordered_json(ch.lower) : ordered_json("-inf");
    j["upper"] = ch.upper;
    j["passed"] = ch.passed;
    summary["checks"].push_back(j);
  }
  summary["diagnostics"] = o.diag;
  summary["passed"] = result.passed;
  summary["wall_time_seconds"] = wall;
  summary["threads"] = config.threads;
  result.summary_json = summary.dump(2);
  result.table = std::move(o.table);
  result.table.metadata["experiment"] = std::string(experiment_name(config.experiment));
  result.table.metadata["version"] = RRT_VERSION;
  result.checks = std::move(o.checks);
  return result;
}

void write_outputs(const ExperimentResult& result, const std::string& csv_path) {
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw IoError("cannot write " + csv_path);
  write_csv(csv, result.table);
  if (!csv) throw IoError("write failed for " + csv_path);
  const std::string json_path = std::filesystem::path(csv_path).replace_extension(".json").string();
  std::ofstream js(json_path, std::ios::binary);
  if (!js) throw IoError("cannot write " + json_path);
  js << result.summary_json << '\n';
  if (!js) throw IoError("write failed for " + json_path);
}

ResultTable emit_plot_data(const ResultTable& table, std::string_view kind) {
  ResultTable plot;
  if (kind == "outdeg-profile") {
    for (const char* name : {"t", "mean_estimate", "stderr", "limit"}) {
      const auto col = table.rows() == 0 && !table.has_column(name) ? std::span<const double>{} : table.column(name);
      plot.add_column(name, std::vector<double>(col.begin(), col.end()));
    }
    return plot;
  }
  if (kind == "arcsine") {
    if (table.rows() == 0) {
      for (const char* name : {"x", "ecdf", "arcsine_cdf"}) plot.add_column(name, std::vector<double>{});
      return plot;
    }
    const auto xs = table.column("x");
    const auto it = table.metadata.find("law_index");
    if (it == table.metadata.end()) throw DomainError("arcsine table lacks the law_index metadata");
    const double index = parse_real(it->second, "law_index");
    const EmpiricalDist emp(std::vector<double>(xs.begin(), xs.end()));
    std::vector<double> grid(101), ecdf(101), limit(101);
    for (std::size_t k = 0; k <= 100; ++k) {
      grid[k] = static_cast<double>(k) / 100.0;
      ecdf[k] = emp.cdf(grid[k]);
      limit[k] = arcsine_cdf(grid[k], index);
    }
    plot.add_column("x", std::move(grid));
    plot.add_column("ecdf", std::move(ecdf));
    plot.add_column("arcsine_cdf", std::move(limit));
    return plot;
  }
  throw DomainError("no plot projection for '" + std::string(kind) + "'");
}

}  // namespace rrt
