#include "cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>

#include "delaygp/analytic.hpp"
#include "delaygp/csv.hpp"
#include "delaygp/diagnostics.hpp"
#include "delaygp/likelihood.hpp"
#include "delaygp/manifest.hpp"
#include "delaygp/nested_sampling.hpp"
#include "delaygp/parallel.hpp"
#include "delaygp/rng.hpp"
#include "delaygp/smc.hpp"
#include "delaygp/svg.hpp"
#include "delaygp/synth.hpp"

namespace fs = std::filesystem;

namespace delaygp::cli {

namespace {

// Read-with-default helpers that write the resolved value back, so the
// manifest records the complete effective configuration.
double rdouble(ConfigMap& cfg, const std::string& key, double fallback) {
  const double v = cfg.get_double(key, fallback);
  cfg.set(key, v);
  return v;
}

std::int64_t rint(ConfigMap& cfg, const std::string& key,
                  std::int64_t fallback) {
  const std::int64_t v = cfg.get_int(key, fallback);
  cfg.set(key, v);
  return v;
}

bool rbool(ConfigMap& cfg, const std::string& key, bool fallback) {
  const bool v = cfg.get_bool(key, fallback);
  cfg.set(key, v);
  return v;
}

std::string rstring(ConfigMap& cfg, const std::string& key,
                    const std::string& fallback) {
  const std::string v = cfg.get_string(key, fallback);
  cfg.set(key, v);
  return v;
}

std::vector<double> rdoubles(ConfigMap& cfg, const std::string& key,
                             std::vector<double> fallback) {
  const std::vector<double> v = cfg.get_double_list(key, std::move(fallback));
  cfg.set(key, v);
  return v;
}

std::vector<std::string> rstrings(ConfigMap& cfg, const std::string& key,
                                  std::vector<std::string> fallback) {
  const std::vector<std::string> v =
      cfg.get_string_list(key, std::move(fallback));
  cfg.set(key, v);
  return v;
}

fs::path require_output_dir(ConfigMap& cfg) {
  const std::string dir = cfg.get_string("output.dir");
  cfg.set("output.dir", dir);
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p))
    throw IoError("cannot create output directory " + p.string());
  return p;
}

struct GridSetup {
  ObservationGrid grid;
  double window;  // t_max - t_min; prior half-width and decorrelation delay
};

GridSetup resolve_grid(ConfigMap& cfg) {
  const int n_data = static_cast<int>(rint(cfg, "grid.n_data", 100));
  const double t_min = rdouble(cfg, "grid.t_min", 0.0);
  const double t_max = rdouble(cfg, "grid.t_max", 1e3);
  const std::string convention =
      rstring(cfg, "grid.convention", "window");
  if (convention == "window")
    return {ObservationGrid::uniform_window(n_data, t_min, t_max),
            t_max - t_min};
  if (convention == "endpoint")
    return {ObservationGrid::uniform(n_data, t_min, t_max), t_max - t_min};
  throw ConfigError("grid.convention must be 'window' or 'endpoint'");
}

HyperParams resolve_truth(ConfigMap& cfg) {
  HyperParams theta;
  theta.amplitude = rdouble(cfg, "truth.amplitude", 1.0);
  theta.length_scale = rdouble(cfg, "truth.length_scale", 10.0);
  theta.noise = rdouble(cfg, "truth.noise", 0.01);
  theta.delay = rdouble(cfg, "truth.delay", 10.0);
  theta.validate();
  return theta;
}

int resolve_threads(ConfigMap& cfg) {
  return static_cast<int>(rint(cfg, "threads", 0));
}

void finish_manifest(const fs::path& out_dir, const std::string& command,
                     const ConfigMap& cfg,
                     std::vector<std::string> outputs,
                     std::vector<std::pair<std::string, std::string>>
                         input_digests = {}) {
  RunManifest m;
  m.command = command;
  m.config = cfg.to_json();
  m.input_digests = std::move(input_digests);
  m.outputs = std::move(outputs);
  write_manifest(out_dir / "manifest.json", m);
}

std::string indexed_name(const char* stem, int index, const char* suffix) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%03d%s", stem, index, suffix);
  return buf;
}

nlohmann::json theta_to_json(const HyperParams& theta) {
  return {{"amplitude", theta.amplitude},
          {"length_scale", theta.length_scale},
          {"noise", theta.noise},
          {"delay", theta.delay}};
}

void write_json(const fs::path& file, const nlohmann::json& j) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write " + file.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + file.string());
}

std::vector<double> linear_grid(double lo, double hi, int n) {
  if (n < 1) throw ConfigError("grid needs at least one point");
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  const double h = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) g[i] = lo + h * i;
  g[n - 1] = hi;
  return g;
}

}  // namespace

int run_simulate(ConfigMap cfg) {
  const fs::path out_dir = require_output_dir(cfg);
  GridSetup gs = resolve_grid(cfg);
  EnsembleSpec spec{resolve_truth(cfg), gs.grid,
                    static_cast<int>(rint(cfg, "ensemble.n_datasets", 25)),
                    static_cast<std::uint64_t>(
                        rint(cfg, "ensemble.base_seed", 20260809))};
  if (std::fabs(spec.theta_true.delay) > gs.window)
    throw ConfigError("truth.delay lies outside the observing window");
  if (spec.n_datasets < 1) throw ConfigError("ensemble.n_datasets must be >= 1");

  std::vector<std::string> outputs;
  for (int k = 0; k < spec.n_datasets; ++k) {
    const std::uint64_t seed =
        derive_stream_seed(spec.base_seed, static_cast<std::uint64_t>(k));
    const LightCurvePair pair = sample_pair(spec.grid, spec.theta_true, seed);
    const std::string y1_name = indexed_name("pair", k, "_y1.csv");
    const std::string y2_name = indexed_name("pair", k, "_y2.csv");
    const std::string meta_name = indexed_name("pair", k, "_meta.json");
    const auto& t = spec.grid.times();
    write_light_curve_csv(out_dir / y1_name, std::span(t.data(), t.size()),
                          std::span(pair.y1.data(), pair.y1.size()));
    write_light_curve_csv(out_dir / y2_name, std::span(t.data(), t.size()),
                          std::span(pair.y2.data(), pair.y2.size()));
    write_json(out_dir / meta_name,
               {{"theta_true", theta_to_json(spec.theta_true)},
                {"grid",
                 {{"n_data", spec.grid.n_data()},
                  {"t_min", spec.grid.t_min()},
                  {"t_max", spec.grid.t_max()}}},
                {"seed", seed},
                {"base_seed", spec.base_seed},
                {"dataset_index", k}});
    outputs.insert(outputs.end(), {y1_name, y2_name, meta_name});
  }
  finish_manifest(out_dir, "simulate", cfg, std::move(outputs));
  return 0;
}

namespace {

int run_scan_analytic(ConfigMap& cfg, const fs::path& out_dir) {
  const GridSetup gs = resolve_grid(cfg);
  const HyperParams theta = resolve_truth(cfg);
  theta.validate();
  const int n_points = static_cast<int>(rint(cfg, "scan.n_points", 2001));
  if (n_points < 1) throw ConfigError("scan.n_points must be >= 1");
  const double lo = rdouble(cfg, "scan.delta_t_min", -gs.window);
  const double hi = rdouble(cfg, "scan.delta_t_max", gs.window);
  if (!(lo <= hi)) throw ConfigError("scan bounds must satisfy min <= max");
  const bool want_svg = rbool(cfg, "scan.svg", false);
  const int threads = resolve_threads(cfg);

  const std::vector<double> dts = linear_grid(lo, hi, n_points);
  const std::vector<ScanRow> rows =
      averaged_scan(gs.grid, theta, dts, threads, gs.window);

  Table table;
  table.columns = {"delta_t", "e_loglik", "sd_exact", "sd_paper",
                   "e_loglik_reg"};
  for (const ScanRow& r : rows)
    table.rows.push_back(
        {r.delta_t, r.e_loglik, r.sd_exact, r.sd_paper, r.e_loglik_reg});
  write_table_csv(out_dir / "scan.csv", table);
  std::vector<std::string> outputs = {"scan.csv"};
  if (want_svg) {
    SvgStyle style;
    style.title = "data-averaged log-likelihood vs delay";
    write_svg(out_dir / "scan.svg", table, style);
    outputs.push_back("scan.svg");
  }
  finish_manifest(out_dir, "scan", cfg, std::move(outputs));
  return 0;
}

int run_scan_data(ConfigMap& cfg, const fs::path& out_dir) {
  const std::string y1_file = cfg.get_string("data.y1");
  const std::string y2_file = cfg.get_string("data.y2");
  cfg.set("data.y1", y1_file);
  cfg.set("data.y2", y2_file);
  const bool do_whiten = rbool(cfg, "data.whiten", true);
  const double amplitude = rdouble(cfg, "model.amplitude", 1.0);
  const double noise = rdouble(cfg, "model.noise", 0.01);
  const std::vector<double> ells =
      rdoubles(cfg, "model.ells", {1.0, 10.0, 100.0});
  for (double l : ells)
    if (!(l > 0.0)) throw ConfigError("model.ells must be positive");
  const int n_points = static_cast<int>(rint(cfg, "scan.n_points", 2001));
  if (n_points < 1) throw ConfigError("scan.n_points must be >= 1");
  const bool want_svg = rbool(cfg, "scan.svg", false);

  LightCurve a = read_light_curve_csv(y1_file);
  LightCurve b = read_light_curve_csv(y2_file);
  LightCurvePair pair = make_pair_from_curves(a, b);
  if (do_whiten) {
    pair = LightCurvePair(whiten(pair.y1), whiten(pair.y2), pair.grid);
  }
  const double lo = rdouble(cfg, "scan.delta_t_min", -pair.grid.t_range());
  const double hi = rdouble(cfg, "scan.delta_t_max", pair.grid.t_range());
  if (!(lo <= hi)) throw ConfigError("scan bounds must satisfy min <= max");

  const std::vector<double> dts = linear_grid(lo, hi, n_points);
  Table table;
  table.columns = {"delta_t"};
  for (double l : ells)
    table.columns.push_back("loglik_ell_" + format_double(l));
  table.rows.resize(dts.size());

  std::vector<DelayLogLikelihood> logliks;
  logliks.reserve(ells.size());
  for (double l : ells) {
    HyperParams theta;
    theta.amplitude = amplitude;
    theta.length_scale = l;
    theta.noise = noise;
    logliks.emplace_back(pair, theta);
  }
  parallel_for(
      dts.size(),
      [&](std::size_t i) {
        table.rows[i].resize(1 + ells.size());
        table.rows[i][0] = dts[i];
        for (std::size_t j = 0; j < ells.size(); ++j)
          table.rows[i][1 + j] = logliks[j](dts[i]);
      },
      resolve_threads(cfg));

  write_table_csv(out_dir / "scan.csv", table);
  std::vector<std::string> outputs = {"scan.csv"};
  if (want_svg) {
    SvgStyle style;
    style.title = "log-likelihood vs delay";
    write_svg(out_dir / "scan.svg", table, style);
    outputs.push_back("scan.svg");
  }
  finish_manifest(out_dir, "scan", cfg, std::move(outputs),
                  {{y1_file, fnv1a_digest(y1_file)},
                   {y2_file, fnv1a_digest(y2_file)}});
  return 0;
}

}  // namespace

int run_scan(ConfigMap cfg) {
  const fs::path out_dir = require_output_dir(cfg);
  const std::string mode = rstring(cfg, "scan.mode", "analytic");
  if (mode == "analytic") return run_scan_analytic(cfg, out_dir);
  if (mode == "data") return run_scan_data(cfg, out_dir);
  throw ConfigError("scan.mode must be 'analytic' or 'data'");
}

namespace {

struct SamplerSetup {
  std::string kind;        // "ns" | "smc"
  std::string dimensions;  // "delay" | "joint"
  int nlive;
  int num_repeats;
  double termination_frac;
  int n_particles;
  int mcmc_steps;
  double target_ress;
  double proposal_scale;
  std::uint64_t base_seed;
};

SamplerSetup resolve_sampler(ConfigMap& cfg) {
  SamplerSetup s;
  s.kind = rstring(cfg, "sampler.kind", "ns");
  if (s.kind != "ns" && s.kind != "smc")
    throw ConfigError("sampler.kind must be 'ns' or 'smc'");
  s.dimensions = rstring(cfg, "sampler.dimensions", "delay");
  if (s.dimensions != "delay" && s.dimensions != "joint")
    throw ConfigError("sampler.dimensions must be 'delay' or 'joint'");
  const int dim = s.dimensions == "delay" ? 1 : 3;
  s.nlive = static_cast<int>(rint(cfg, "ns.nlive", 75));
  s.num_repeats = static_cast<int>(rint(cfg, "ns.num_repeats", 5 * dim));
  s.termination_frac = rdouble(cfg, "ns.termination_frac", 1e-3);
  s.n_particles = static_cast<int>(rint(cfg, "smc.n_particles", 100));
  s.mcmc_steps = static_cast<int>(rint(cfg, "smc.mcmc_steps", 5));
  s.target_ress = rdouble(cfg, "smc.target_ress", 0.5);
  s.proposal_scale = rdouble(cfg, "smc.proposal_scale", 0.125);
  s.base_seed =
      static_cast<std::uint64_t>(rint(cfg, "sampler.base_seed", 20260809));
  return s;
}

WeightedSamples run_one_sampler(const SamplerSetup& setup,
                                const LogLikFn& loglik, const PriorBox& prior,
                                std::uint64_t seed) {
  if (setup.kind == "ns") {
    NSConfig ns;
    ns.nlive = setup.nlive;
    ns.num_repeats = setup.num_repeats;
    ns.termination_frac = setup.termination_frac;
    ns.seed = seed;
    return nested_sampling(loglik, prior, ns).samples;
  }
  SMCConfig sc;
  sc.n_particles = setup.n_particles;
  sc.mcmc_steps = setup.mcmc_steps;
  sc.target_ress = setup.target_ress;
  sc.proposal_scale = setup.proposal_scale;
  sc.seed = seed;
  return smc(loglik, prior, sc).samples;
}

void write_samples_csv(const fs::path& file, const WeightedSamples& s) {
  Table table;
  for (int k = 0; k < s.dim(); ++k)
    table.columns.push_back("param_" + std::to_string(k));
  table.columns.push_back("log_weight");
  table.columns.push_back("log_likelihood");
  for (int i = 0; i < s.size(); ++i) {
    std::vector<double> row;
    row.reserve(s.dim() + 2);
    for (int k = 0; k < s.dim(); ++k) row.push_back(s.points(i, k));
    row.push_back(s.log_weights[i]);
    row.push_back(s.log_likelihoods.empty() ? 0.0 : s.log_likelihoods[i]);
    table.rows.push_back(std::move(row));
  }
  write_table_csv(file, table);
}

}  // namespace

int run_sample(ConfigMap cfg) {
  const fs::path out_dir = require_output_dir(cfg);
  const std::string source = rstring(cfg, "sample.source", "synthetic");
  const SamplerSetup setup = resolve_sampler(cfg);
  const bool do_merge = rbool(cfg, "merge.enabled", true);
  // Smoke mode: replace the likelihood with a constant, so the posterior
  // must come back uniform over the prior box.
  const bool smoke = rbool(cfg, "sampler.smoke", false);
  const int threads = resolve_threads(cfg);

  std::vector<LightCurvePair> pairs;
  std::vector<std::pair<std::string, std::string>> digests;
  HyperParams truth = resolve_truth(cfg);
  double window = 0.0;
  if (source == "synthetic") {
    GridSetup gs = resolve_grid(cfg);
    window = gs.window;
    EnsembleSpec spec{truth, gs.grid,
                      static_cast<int>(rint(cfg, "ensemble.n_datasets", 25)),
                      static_cast<std::uint64_t>(
                          rint(cfg, "ensemble.base_seed", 20260809))};
    pairs = sample_ensemble(spec);
  } else if (source == "files") {
    const std::vector<std::string> y1_files =
        rstrings(cfg, "data.y1_files", {});
    const std::vector<std::string> y2_files =
        rstrings(cfg, "data.y2_files", {});
    if (y1_files.empty() || y1_files.size() != y2_files.size())
      throw ConfigError("data.y1_files and data.y2_files must pair up");
    for (std::size_t i = 0; i < y1_files.size(); ++i) {
      pairs.push_back(make_pair_from_curves(read_light_curve_csv(y1_files[i]),
                                            read_light_curve_csv(y2_files[i])));
      digests.emplace_back(y1_files[i], fnv1a_digest(y1_files[i]));
      digests.emplace_back(y2_files[i], fnv1a_digest(y2_files[i]));
    }
  } else {
    throw ConfigError("sample.source must be 'synthetic' or 'files'");
  }

  const double t_range = window > 0.0 ? window : pairs[0].grid.t_range();
  const PriorBox prior = setup.dimensions == "delay"
                             ? PriorBox::delay_only(t_range)
                             : PriorBox::joint_delay_ell_sigma(t_range);

  std::vector<WeightedSamples> runs(pairs.size());
  parallel_for(
      pairs.size(),
      [&](std::size_t i) {
        const LightCurvePair& pair = pairs[i];
        LogLikFn fn;
        if (smoke) {
          fn = [](std::span<const double>) { return 0.0; };
        } else if (setup.dimensions == "delay") {
          auto delay_loglik = std::make_shared<DelayLogLikelihood>(pair, truth);
          fn = [delay_loglik](std::span<const double> x) {
            return (*delay_loglik)(x[0]);
          };
        } else {
          const double amplitude = truth.amplitude;
          const LightCurvePair* p = &pair;
          fn = [p, amplitude](std::span<const double> x) {
            HyperParams theta;
            theta.amplitude = amplitude;
            theta.delay = x[0];
            theta.length_scale = x[1];
            theta.noise = x[2];
            if (!(theta.length_scale > 0.0) || theta.noise < 0.0)
              return log_zero;
            return log_likelihood(*p, theta);
          };
        }
        runs[i] = run_one_sampler(
            setup, fn, prior,
            derive_stream_seed(setup.base_seed,
                               static_cast<std::uint64_t>(i)));
      },
      threads);

  std::vector<std::string> outputs;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::string samples_name =
        indexed_name("run", static_cast<int>(i), "_samples.csv");
    const std::string meta_name =
        indexed_name("run", static_cast<int>(i), "_meta.json");
    write_samples_csv(out_dir / samples_name, runs[i]);
    write_json(out_dir / meta_name,
               {{"logZ", runs[i].logZ},
                {"logZ_err", runs[i].logZ_err},
                {"ess", runs[i].ess},
                {"seed", derive_stream_seed(setup.base_seed,
                                            static_cast<std::uint64_t>(i))},
                {"config", cfg.to_json()}});
    outputs.insert(outputs.end(), {samples_name, meta_name});
  }

  if (do_merge) {
    const std::uint64_t merge_seed = static_cast<std::uint64_t>(
        rint(cfg, "merge.seed",
             static_cast<std::int64_t>(
                 derive_stream_seed(setup.base_seed, 0xfffffffful) >> 1)));
    const Eigen::MatrixXd pool = merge_equal_weight(runs, merge_seed);
    Table table;
    for (int k = 0; k < pool.cols(); ++k)
      table.columns.push_back("param_" + std::to_string(k));
    for (int i = 0; i < pool.rows(); ++i) {
      std::vector<double> row(pool.cols());
      for (int k = 0; k < pool.cols(); ++k) row[k] = pool(i, k);
      table.rows.push_back(std::move(row));
    }
    write_table_csv(out_dir / "merged.csv", table);
    outputs.push_back("merged.csv");
  }
  finish_manifest(out_dir, "sample", cfg, std::move(outputs),
                  std::move(digests));
  return 0;
}

int run_convergence(ConfigMap cfg) {
  const fs::path out_dir = require_output_dir(cfg);
  StudySpec spec;
  spec.samplers = rstrings(cfg, "study.samplers", {"ns", "smc"});
  {
    std::vector<double> budgets =
        rdoubles(cfg, "study.budgets", {10, 25, 100, 250});
    spec.budgets.clear();
    for (double b : budgets) spec.budgets.push_back(static_cast<int>(b));
  }
  spec.t_ranges = rdoubles(cfg, "study.t_ranges", {1e3});
  spec.n_runs = static_cast<int>(rint(cfg, "study.n_runs", 50));
  spec.n_data = static_cast<int>(rint(cfg, "study.n_data", 100));
  spec.theta_true = resolve_truth(cfg);
  spec.base_seed =
      static_cast<std::uint64_t>(rint(cfg, "study.base_seed", 20260809));
  spec.fresh_dataset_per_run = rbool(cfg, "study.fresh_dataset_per_run", true);
  spec.ns_num_repeats = static_cast<int>(rint(cfg, "ns.num_repeats", 5));
  spec.ns_termination_frac = rdouble(cfg, "ns.termination_frac", 1e-3);
  spec.smc_mcmc_steps = static_cast<int>(rint(cfg, "smc.mcmc_steps", 5));
  spec.smc_target_ress = rdouble(cfg, "smc.target_ress", 0.5);
  spec.smc_proposal_scale = rdouble(cfg, "smc.proposal_scale", 0.125);
  spec.n_threads = resolve_threads(cfg);

  const bool calibrate = rbool(cfg, "study.calibrate", false);
  if (calibrate) {
    const int ref_nlive =
        static_cast<int>(rint(cfg, "study.reference_nlive", 500));
    const int n_ref = static_cast<int>(rint(cfg, "study.n_reference", 10));
    const double t_range = spec.t_ranges[0];
    const ObservationGrid grid =
        ObservationGrid::uniform_window(spec.n_data, 0.0, t_range);
    std::vector<WeightedSamples> refs(n_ref);
    std::vector<LaplaceApprox> laplaces(n_ref);
    parallel_for(
        static_cast<std::size_t>(n_ref),
        [&](std::size_t i) {
          const std::uint64_t ds =
              derive_stream_seed(spec.base_seed ^ 0xca11b7a7e5eedULL, 2 * i);
          const std::uint64_t ss = derive_stream_seed(
              spec.base_seed ^ 0xca11b7a7e5eedULL, 2 * i + 1);
          const LightCurvePair pair = sample_pair(grid, spec.theta_true, ds);
          const DelayLogLikelihood loglik(pair, spec.theta_true);
          laplaces[i] = laplace_at_true_mode(
              [&](double dt) { return loglik(dt); }, spec.theta_true.delay,
              -t_range, t_range, laplace_fd_step(t_range));
          NSConfig ns;
          ns.nlive = ref_nlive;
          ns.num_repeats = spec.ns_num_repeats;
          ns.termination_frac = spec.ns_termination_frac;
          ns.seed = ss;
          refs[i] = nested_sampling(
                        [&](std::span<const double> x) { return loglik(x[0]); },
                        PriorBox::delay_only(t_range), ns)
                        .samples;
        },
        spec.n_threads);
    spec.f = calibrate_f(refs, laplaces);
    cfg.set("study.f", spec.f);
  } else {
    spec.f = rdouble(cfg, "study.f", 5.0);
  }

  const StudyResult result = convergence_study(spec);

  std::vector<std::string> outputs;
  {
    std::ofstream out(out_dir / "fractions.csv", std::ios::binary);
    if (!out) throw IoError("cannot write fractions.csv");
    out << "sampler,budget,t_range,n_runs,n_unconverged,n_excluded,fraction\n";
    for (const StudyCell& c : result.cells) {
      out << c.sampler << ',' << c.budget << ',' << format_double(c.t_range)
          << ',' << c.n_runs << ',' << c.n_unconverged << ',' << c.n_excluded
          << ',' << format_double(c.fraction) << '\n';
    }
    if (!out) throw IoError("write failed for fractions.csv");
    outputs.push_back("fractions.csv");
  }
  {
    std::ofstream out(out_dir / "runs.csv", std::ios::binary);
    if (!out) throw IoError("cannot write runs.csv");
    out << "sampler,budget,t_range,run_id,dataset_seed,sampler_seed,"
           "posterior_mean,laplace_mode,laplace_sd,deviation,f,converged,"
           "excluded\n";
    for (const StudyRunRow& r : result.runs) {
      out << r.sampler << ',' << r.budget << ',' << format_double(r.t_range)
          << ',' << r.run_id << ',' << r.dataset_seed << ',' << r.sampler_seed
          << ',' << format_double(r.posterior_mean) << ','
          << format_double(r.laplace_mode) << ',' << format_double(r.laplace_sd)
          << ',' << format_double(r.deviation) << ',' << format_double(spec.f)
          << ',' << (r.converged ? 1 : 0) << ',' << (r.excluded ? 1 : 0)
          << '\n';
    }
    if (!out) throw IoError("write failed for runs.csv");
    outputs.push_back("runs.csv");
  }
  if (rbool(cfg, "study.svg", false)) {
    // One polyline per (sampler, t_range) of fraction vs budget.
    Table plot;
    plot.columns = {"budget"};
    std::vector<std::pair<std::string, double>> groups;
    for (const StudyCell& c : result.cells) {
      const std::pair<std::string, double> g{c.sampler, c.t_range};
      bool found = false;
      for (const auto& existing : groups)
        if (existing == g) found = true;
      if (!found) groups.push_back(g);
    }
    for (const auto& [sampler, t_range] : groups)
      plot.columns.push_back("fraction_" + sampler + "_t" +
                             format_double(t_range));
    for (int b : spec.budgets) {
      std::vector<double> row{static_cast<double>(b)};
      for (const auto& [sampler, t_range] : groups) {
        double v = std::numeric_limits<double>::quiet_NaN();
        for (const StudyCell& c : result.cells)
          if (c.sampler == sampler && c.t_range == t_range && c.budget == b)
            v = c.fraction;
        row.push_back(v);
      }
      plot.rows.push_back(std::move(row));
    }
    SvgStyle style;
    style.title = "fraction of unconverged runs";
    write_svg(out_dir / "fractions.svg", plot, style);
    outputs.push_back("fractions.svg");
  }
  finish_manifest(out_dir, "convergence", cfg, std::move(outputs));
  return 0;
}

int run_appendix(ConfigMap cfg) {
  const fs::path out_dir = require_output_dir(cfg);
  const std::string which = cfg.get_string("appendix.which");
  cfg.set("appendix.which", which);
  std::vector<std::string> outputs;

  if (which == "lengthscale") {
    const double ell_true = rdouble(cfg, "lengthscale.ell_true", 10.0);
    const double dt = rdouble(cfg, "lengthscale.dt", 10.0);
    const int n = static_cast<int>(rint(cfg, "lengthscale.n_points", 1000));
    const double lo = rdouble(cfg, "lengthscale.ell_min", 0.5);
    const double hi = rdouble(cfg, "lengthscale.ell_max", 20.0 * ell_true);
    if (!(lo > 0.0 && lo < hi)) throw ConfigError("bad length scale grid");
    Table table;
    table.columns = {"ell", "loglik_per_point"};
    for (double ell : linear_grid(lo, hi, n))
      table.rows.push_back({ell, largescale_length_loglik(ell, ell_true, dt)});
    write_table_csv(out_dir / "lengthscale.csv", table);
    outputs.push_back("lengthscale.csv");
  } else if (which == "moments") {
    const ObservationGrid grid{[&] {
      const int n_data = static_cast<int>(rint(cfg, "grid.n_data", 4));
      const double t_min = rdouble(cfg, "grid.t_min", 0.0);
      const double t_max = rdouble(cfg, "grid.t_max", 30.0);
      return ObservationGrid::uniform(n_data, t_min, t_max);
    }()};
    HyperParams theta = resolve_truth(cfg);
    const std::vector<double> sigmas =
        rdoubles(cfg, "moments.sigmas", {1e-2, 1e-3, 1e-4});
    Table table;
    table.columns = {"sigma", "delta_t", "log_e_l", "log_e_l2",
                     "log_e_l_closed_zero_delay"};
    for (double sigma : sigmas) {
      HyperParams t = theta;
      t.noise = sigma;
      for (double delta_t : {0.0, grid.t_range()}) {
        HyperParams model = t.with_delay(delta_t);
        HyperParams truth = t.with_delay(delta_t);
        const LikelihoodMoments m =
            averaged_likelihood_moments(grid, model, truth);
        const double closed =
            delta_t == 0.0 ? moments_closed_form_zero_delay(grid, t).log_e_l
                           : std::numeric_limits<double>::quiet_NaN();
        table.rows.push_back({sigma, delta_t, m.log_e_l, m.log_e_l2, closed});
      }
    }
    write_table_csv(out_dir / "moments.csv", table);
    outputs.push_back("moments.csv");
  } else if (which == "bayes-spectrum") {
    const ObservationGrid grid{[&] {
      const int n_data = static_cast<int>(rint(cfg, "grid.n_data", 50));
      const double t_min = rdouble(cfg, "grid.t_min", 0.0);
      const double t_max = rdouble(cfg, "grid.t_max", 1e3);
      return ObservationGrid::uniform(n_data, t_min, t_max);
    }()};
    const HyperParams theta = resolve_truth(cfg);
    const SpectrumReport report = bayes_factor_spectrum(
        grid, theta.amplitude, theta.length_scale, theta.noise);
    Table table;
    table.columns = {"index", "rho"};
    for (std::size_t i = 0; i < report.rho.size(); ++i)
      table.rows.push_back({static_cast<double>(i), report.rho[i]});
    write_table_csv(out_dir / "bayes_spectrum.csv", table);
    outputs.push_back("bayes_spectrum.csv");
    cfg.set("result.min_rho", report.min_rho);
    cfg.set("result.is_positive_definite", report.is_positive_definite);
  } else if (which == "condition") {
    const GridSetup gs = resolve_grid(cfg);
    const HyperParams theta = resolve_truth(cfg);
    const bool dense = rbool(cfg, "condition.dense", false);
    const int n_points = static_cast<int>(
        rint(cfg, "condition.n_points", dense ? 60000 : 2001));
    const std::vector<double> dts =
        linear_grid(-gs.window, gs.window, n_points);
    const auto scan =
        condition_number_scan(gs.grid, theta, dts, resolve_threads(cfg));
    Table table;
    table.columns = {"delta_t", "condition_number"};
    for (const auto& [dt, cond] : scan) table.rows.push_back({dt, cond});
    write_table_csv(out_dir / "condition.csv", table);
    outputs.push_back("condition.csv");
  } else {
    throw ConfigError(
        "appendix.which must be one of lengthscale, moments, bayes-spectrum, "
        "condition");
  }
  finish_manifest(out_dir, "appendix", cfg, std::move(outputs));
  return 0;
}

int run_plot(ConfigMap cfg) {
  const fs::path out_dir = require_output_dir(cfg);
  const std::string input = cfg.get_string("plot.input");
  cfg.set("plot.input", input);
  const std::string name = rstring(cfg, "plot.output", "plot.svg");
  SvgStyle style;
  style.title = rstring(cfg, "plot.title", "");
  style.log_y = rbool(cfg, "plot.log_y", false);
  const Table table = read_table_csv(input);
  write_svg(out_dir / name, table, style);
  finish_manifest(out_dir, "plot", cfg, {name},
                  {{input, fnv1a_digest(input)}});
  return 0;
}

int dispatch(const std::string& command, ConfigMap cfg) {
  if (command == "simulate") return run_simulate(std::move(cfg));
  if (command == "scan") return run_scan(std::move(cfg));
  if (command == "sample") return run_sample(std::move(cfg));
  if (command == "convergence") return run_convergence(std::move(cfg));
  if (command == "appendix") return run_appendix(std::move(cfg));
  if (command == "plot") return run_plot(std::move(cfg));
  throw ConfigError("unknown command '" + command + "'");
}

int run_rerun(const std::filesystem::path& manifest_file) {
  const RunManifest m = read_manifest(manifest_file);
  return dispatch(m.command, ConfigMap::from_json(m.config));
}

}  // namespace delaygp::cli
