#include "delaygp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "delaygp/likelihood.hpp"
#include "delaygp/nested_sampling.hpp"
#include "delaygp/parallel.hpp"
#include "delaygp/smc.hpp"
#include "delaygp/synth.hpp"

namespace delaygp {

LaplaceApprox laplace_at_true_mode(const std::function<double(double)>& loglik,
                                   double init, double lo, double hi,
                                   double fd_step) {
  if (!(fd_step > 0.0)) throw ConfigError("fd_step must be > 0");
  double x = init;
  const double h = fd_step;
  double d2 = 0.0;
  for (int it = 0; it < 100; ++it) {
    if (x < lo || x > hi)
      throw NumericalError("laplace: Newton iteration left the prior range");
    const double f0 = loglik(x);
    const double fp = loglik(x + h);
    const double fm = loglik(x - h);
    if (is_impossible(f0) || is_impossible(fp) || is_impossible(fm))
      throw NumericalError("laplace: likelihood impossible near the mode");
    const double d1 = (fp - fm) / (2.0 * h);
    d2 = (fp - 2.0 * f0 + fm) / (h * h);
    if (d2 == 0.0) throw NumericalError("laplace: zero curvature");
    const double step = -d1 / d2;
    x += step;
    if (std::fabs(step) < 1e-6) break;
  }
  if (x < lo || x > hi)
    throw NumericalError("laplace: Newton iteration left the prior range");
  if (!(d2 < 0.0))
    throw NumericalError("laplace: terminus is not a maximum");
  LaplaceApprox out;
  out.mode = x;
  out.curvature = d2;
  out.sd = 1.0 / std::sqrt(-d2);
  return out;
}

ConvergenceRecord classify_convergence(const WeightedSamples& samples,
                                       const LaplaceApprox& laplace, double f,
                                       int run_id, int budget, int dim_index) {
  if (samples.size() == 0)
    throw ConfigError("classify_convergence: empty sample set");
  ConvergenceRecord rec;
  rec.run_id = run_id;
  rec.budget = budget;
  rec.laplace = laplace;
  rec.f_threshold = f;
  rec.posterior_mean = posterior_mean(samples, dim_index);
  rec.deviation = std::fabs(rec.posterior_mean - laplace.mode) / laplace.sd;
  rec.converged = rec.deviation <= f;
  return rec;
}

double calibrate_f(std::span<const WeightedSamples> reference_runs,
                   std::span<const LaplaceApprox> laplaces, int dim_index) {
  if (reference_runs.empty())
    throw ConfigError("calibrate_f: no reference runs");
  if (reference_runs.size() != laplaces.size())
    throw ConfigError("calibrate_f: runs and Laplace fits must pair up");
  double f = 0.0;
  for (std::size_t i = 0; i < reference_runs.size(); ++i) {
    const ConvergenceRecord rec = classify_convergence(
        reference_runs[i], laplaces[i], 0.0, 0, 0, dim_index);
    f = std::max(f, rec.deviation);
  }
  return f;
}

double calibrate_f(std::span<const WeightedSamples> reference_runs,
                   const LaplaceApprox& laplace, int dim_index) {
  std::vector<LaplaceApprox> laplaces(reference_runs.size(), laplace);
  return calibrate_f(reference_runs, laplaces, dim_index);
}

void StudySpec::validate() const {
  if (samplers.empty()) throw ConfigError("study: no samplers listed");
  for (const std::string& s : samplers)
    if (s != "ns" && s != "smc")
      throw ConfigError("study: unknown sampler '" + s + "'");
  if (budgets.empty()) throw ConfigError("study: empty budget list");
  for (int b : budgets)
    if (b < 2) throw ConfigError("study: budgets must be >= 2");
  if (t_ranges.empty()) throw ConfigError("study: empty t_range list");
  if (n_runs < 1) throw ConfigError("study: n_runs must be >= 1");
  if (n_data < 1) throw ConfigError("study: n_data must be >= 1");
  if (!(f > 0.0)) throw ConfigError("study: f must be > 0");
  theta_true.validate();
}

StudyResult convergence_study(const StudySpec& spec) {
  spec.validate();

  struct Task {
    std::size_t cell;
    int run_id;
    std::string sampler;
    int budget;
    double t_range;
  };
  std::vector<Task> tasks;
  std::vector<StudyCell> cells;
  for (const std::string& sampler : spec.samplers)
    for (double t_range : spec.t_ranges)
      for (int budget : spec.budgets) {
        StudyCell cell;
        cell.sampler = sampler;
        cell.budget = budget;
        cell.t_range = t_range;
        cell.n_runs = spec.n_runs;
        for (int r = 0; r < spec.n_runs; ++r)
          tasks.push_back({cells.size(), r, sampler, budget, t_range});
        cells.push_back(cell);
      }

  std::vector<StudyRunRow> rows(tasks.size());
  parallel_for(
      tasks.size(),
      [&](std::size_t idx) {
        const Task& task = tasks[idx];
        StudyRunRow& row = rows[idx];
        row.sampler = task.sampler;
        row.budget = task.budget;
        row.t_range = task.t_range;
        row.run_id = task.run_id;

        // Seeds: dataset stream and sampler stream derived from the global
        // task index so every run is independent and reproducible.  With
        // shared datasets, all runs of a cell reuse the run-0 dataset seed.
        const std::uint64_t dataset_stream =
            spec.fresh_dataset_per_run ? 2 * idx
                                       : 2 * (idx - task.run_id);
        row.dataset_seed = derive_stream_seed(spec.base_seed, dataset_stream);
        row.sampler_seed = derive_stream_seed(spec.base_seed, 2 * idx + 1);

        // Observing-window sampling; the prior and Laplace range use the
        // window, not the last observation time.
        const ObservationGrid grid =
            ObservationGrid::uniform_window(spec.n_data, 0.0, task.t_range);
        const LightCurvePair pair =
            sample_pair(grid, spec.theta_true, row.dataset_seed);
        const DelayLogLikelihood delay_loglik(pair, spec.theta_true);
        const double t_range = task.t_range;

        LaplaceApprox laplace;
        try {
          laplace = laplace_at_true_mode(
              [&](double dt) { return delay_loglik(dt); },
              spec.theta_true.delay, -t_range, t_range,
              laplace_fd_step(t_range));
        } catch (const NumericalError&) {
          row.excluded = true;
          return;
        }
        row.laplace_mode = laplace.mode;
        row.laplace_sd = laplace.sd;

        const PriorBox prior = PriorBox::delay_only(t_range);
        const LogLikFn fn = [&](std::span<const double> x) {
          return delay_loglik(x[0]);
        };
        WeightedSamples samples;
        if (task.sampler == "ns") {
          NSConfig cfg;
          cfg.nlive = task.budget;
          cfg.num_repeats = spec.ns_num_repeats;
          cfg.termination_frac = spec.ns_termination_frac;
          cfg.seed = row.sampler_seed;
          samples = nested_sampling(fn, prior, cfg).samples;
        } else {
          SMCConfig cfg;
          cfg.n_particles = task.budget;
          cfg.mcmc_steps = spec.smc_mcmc_steps;
          cfg.target_ress = spec.smc_target_ress;
          cfg.proposal_scale = spec.smc_proposal_scale;
          cfg.seed = row.sampler_seed;
          samples = smc(fn, prior, cfg).samples;
        }
        const ConvergenceRecord rec = classify_convergence(
            samples, laplace, spec.f, task.run_id, task.budget);
        row.posterior_mean = rec.posterior_mean;
        row.deviation = rec.deviation;
        row.converged = rec.converged;
      },
      spec.n_threads);

  StudyResult result;
  result.cells = std::move(cells);
  result.runs = std::move(rows);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    StudyCell& cell = result.cells[tasks[i].cell];
    if (result.runs[i].excluded)
      ++cell.n_excluded;
    else if (!result.runs[i].converged)
      ++cell.n_unconverged;
  }
  for (StudyCell& cell : result.cells) {
    const int classified = cell.n_runs - cell.n_excluded;
    cell.fraction = classified > 0
                        ? static_cast<double>(cell.n_unconverged) / classified
                        : std::numeric_limits<double>::quiet_NaN();
  }
  return result;
}

}  // namespace delaygp
