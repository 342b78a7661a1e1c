#ifndef DELAYGP_DIAGNOSTICS_HPP
#define DELAYGP_DIAGNOSTICS_HPP

#include <functional>
#include <string>
#include <vector>

#include "delaygp/sampling.hpp"
#include "delaygp/types.hpp"

namespace delaygp {

// Local Gaussian fit at the likelihood mode near the true delay.
struct LaplaceApprox {
  double mode = 0.0;       // days
  double sd = 0.0;         // days, 1/sqrt(-curvature)
  double curvature = 0.0;  // d2 logL / d delta_t^2 at the mode, < 0
};

// Newton iteration on d(logL)/d(delta_t) with central finite differences of
// step fd_step, initialised at init (the true delay in the studies).
// Throws NumericalError when the iteration leaves [lo, hi] or ends at
// non-negative curvature.
LaplaceApprox laplace_at_true_mode(const std::function<double(double)>& loglik,
                                   double init, double lo, double hi,
                                   double fd_step);

// fd_step convention used everywhere: max(1e-3 days, 1e-6 * t_range).
inline double laplace_fd_step(double t_range) {
  return std::max(1e-3, 1e-6 * t_range);
}

// Verdict for one sampler run.  The deviation is measured in Laplace
// standard deviations, never in the run's own posterior spread (which can be
// huge and mask a miss).
struct ConvergenceRecord {
  int run_id = 0;
  int budget = 0;  // live points or particles
  double posterior_mean = 0.0;
  LaplaceApprox laplace;
  double deviation = 0.0;
  double f_threshold = 0.0;
  bool converged = false;
};

ConvergenceRecord classify_convergence(const WeightedSamples& samples,
                                       const LaplaceApprox& laplace, double f,
                                       int run_id = 0, int budget = 0,
                                       int dim_index = 0);

// f = largest deviation over reference runs believed converged; one Laplace
// fit per run (or a single shared one).
double calibrate_f(std::span<const WeightedSamples> reference_runs,
                   std::span<const LaplaceApprox> laplaces, int dim_index = 0);
double calibrate_f(std::span<const WeightedSamples> reference_runs,
                   const LaplaceApprox& laplace, int dim_index = 0);

// Unconverged-fraction study over samplers, budgets and observation windows.
struct StudySpec {
  std::vector<std::string> samplers = {"ns"};        // "ns" and/or "smc"
  std::vector<int> budgets = {10, 25, 100, 250};     // nlive or particles
  std::vector<double> t_ranges = {1e3};
  int n_runs = 50;
  int n_data = 100;
  HyperParams theta_true{1.0, 10.0, 0.01, 10.0};
  double f = 5.0;  // used verbatim; calibrate separately if desired
  std::uint64_t base_seed = 0;
  // One fresh dataset per run (the default) or one dataset shared by all
  // runs of a cell.
  bool fresh_dataset_per_run = true;
  int ns_num_repeats = 5;  // 1-D rule: 5 per dimension
  double ns_termination_frac = 1e-3;
  int smc_mcmc_steps = 5;
  double smc_target_ress = 0.5;
  double smc_proposal_scale = 0.125;
  int n_threads = 0;

  void validate() const;
};

struct StudyCell {
  std::string sampler;
  int budget = 0;
  double t_range = 0.0;
  int n_runs = 0;
  int n_unconverged = 0;
  int n_excluded = 0;  // failed Laplace fits
  double fraction = 0.0;
};

struct StudyRunRow {
  std::string sampler;
  int budget = 0;
  double t_range = 0.0;
  int run_id = 0;
  std::uint64_t dataset_seed = 0;
  std::uint64_t sampler_seed = 0;
  double posterior_mean = 0.0;
  double laplace_mode = 0.0;
  double laplace_sd = 0.0;
  double deviation = 0.0;
  bool converged = false;
  bool excluded = false;
};

struct StudyResult {
  std::vector<StudyCell> cells;
  std::vector<StudyRunRow> runs;
};

// Executes the study; runs are independent and parallelised, and the
// aggregate depends only on the seeds, not on scheduling.
StudyResult convergence_study(const StudySpec& spec);

}  // namespace delaygp

#endif
