#ifndef DELAYGP_ANALYTIC_HPP
#define DELAYGP_ANALYTIC_HPP

#include <span>
#include <utility>
#include <vector>

#include "delaygp/numerics.hpp"
#include "delaygp/types.hpp"

namespace delaygp {

// E_y log L and its variance when the data are drawn with theta_true and the
// model is evaluated at theta_model.
//
//   e_loglik  = -1/2 Tr(K_model^-1 K_true) - 1/2 log |2 pi K_model|
//   var_exact = 1/2 Tr[(K_model^-1 K_true)^2]      (Isserlis)
//   var_paper = 1/4 sum_ij (K_model^-1)_ij [K_ii K_jj + (K_ji)^2]
//
// var_exact is what the harness reports as sigma_logL; var_paper is the
// printed form, exported alongside for comparison.  On a Cholesky failure of
// K_model, e_loglik is log_zero and both variances NaN.
struct AveragedLogLik {
  double e_loglik = log_zero;
  double var_exact = 0.0;
  double var_paper = 0.0;

  bool impossible() const { return is_impossible(e_loglik); }
};

AveragedLogLik averaged_loglik(const ObservationGrid& grid,
                               const HyperParams& theta_model,
                               const HyperParams& theta_true);

// E_y log L(delta_t) minus the same average over fictitious fully
// decorrelated data (true delay = the observing-window range).  The model
// covariance, built from theta_base at the scanned delta_t, is shared by
// both terms, so the log-determinants cancel and the drift towards the
// window edges is subtracted.  decorr_delay <= 0 means grid.t_range().
double regularised_averaged_loglik(const ObservationGrid& grid, double delta_t,
                                   const HyperParams& theta_base,
                                   const HyperParams& theta_true,
                                   double decorr_delay = 0.0);

// One row of the delay scan used for the "W"-shape figures.
struct ScanRow {
  double delta_t = 0.0;
  double e_loglik = log_zero;
  double sd_exact = 0.0;
  double sd_paper = 0.0;
  double e_loglik_reg = 0.0;
};

// Scans e_loglik / sd / e_loglik_reg over delta_t values; parallelised by
// partitioning the grid, output ordered by delta_t.  theta_true carries the
// true delay; the model hyperparameters (A, ell, sigma) are copied from it.
// decorr_delay <= 0 means grid.t_range().
std::vector<ScanRow> averaged_scan(const ObservationGrid& grid,
                                   const HyperParams& theta_true,
                                   std::span<const double> delta_t_grid,
                                   int n_threads = 0,
                                   double decorr_delay = 0.0);

// First two moments of the data-averaged likelihood (not log-likelihood),
// returned as logs:
//   log E_y L   = -1/2 log |2 pi (K_model + K_true)|
//   log E_y L^2 = -1/2 log |4 pi^2 K_model (K_model + 2 K_true)|
struct LikelihoodMoments {
  double log_e_l = log_zero;
  double log_e_l2 = log_zero;

  bool impossible() const { return is_impossible(log_e_l); }
};

LikelihoodMoments averaged_likelihood_moments(const ObservationGrid& grid,
                                              const HyperParams& theta_model,
                                              const HyperParams& theta_true);

// Closed-form specialisation of the moments at delta_t_model =
// delta_t_true = 0, where the joint determinant factorises:
//   log E_y L   = -(n/2) log 4pi - n_data log sigma - 1/2 log |2 K0 + s2 I|
//   log E_y L^2 = -(n/2) log 12pi^2 - 2 n_data log sigma - log |2 K0 + s2 I|
// with K0 = K(t, t), n = 2 n_data.  Both moments diverge as sigma -> 0.
LikelihoodMoments moments_closed_form_zero_delay(const ObservationGrid& grid,
                                                 const HyperParams& theta);

// Spectrum deciding whether the variance of the data-averaged Bayes factor
// between delta_t = 0 and delta_t = infinity exists: with kappa_i the
// eigenvalues of K(t, t), S = 3I - 2 K_0 K_inf^-1 has eigenvalues
// rho = 1 -+ 2 kappa / (kappa + sigma^2).  Negative rho means the second
// moment diverges.
struct SpectrumReport {
  std::vector<double> rho;  // ascending
  double min_rho = 0.0;
  bool is_positive_definite = false;
};

SpectrumReport bayes_factor_spectrum(const ObservationGrid& grid,
                                     double amplitude, double length_scale,
                                     double noise);

// Large-n per-data-point log-likelihood of the length scale on a uniform
// grid with spacing dt (circulant limit):
//   -1/2 [ (1 + a^2 - 2ab) / (1 - a^2) + log(1 - a^2) + log 2pi ]
// with a = exp(-dt/ell), b = exp(-dt/ell_true).  Maximised at ell =
// ell_true; decays linearly, slope -(1 - b)/(2 dt), for large ell.
double largescale_length_loglik(double ell, double ell_true, double dt);

// Condition number lambda_max / lambda_min of the joint covariance along a
// delay grid.  Non-positive or denormal-small lambda_min reports +inf.
std::vector<std::pair<double, double>> condition_number_scan(
    const ObservationGrid& grid, const HyperParams& theta_base,
    std::span<const double> delta_t_grid, int n_threads = 0);

}  // namespace delaygp

#endif
