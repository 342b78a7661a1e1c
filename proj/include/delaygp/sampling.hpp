#ifndef DELAYGP_SAMPLING_HPP
#define DELAYGP_SAMPLING_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "delaygp/numerics.hpp"
#include "delaygp/errors.hpp"

namespace delaygp {

// Log-likelihood over a parameter vector; may return log_zero.
using LogLikFn = std::function<double(std::span<const double>)>;

// Axis-aligned uniform prior.
struct PriorBox {
  std::vector<double> lower;
  std::vector<double> upper;

  int dim() const { return static_cast<int>(lower.size()); }
  void validate() const;
  bool contains(std::span<const double> x) const;
  double log_volume() const;

  // Delay-only prior: delta_t in [-t_range, t_range].
  static PriorBox delay_only(double t_range);
  // Joint prior: delta_t in [-t_range, t_range], ell in [0, t_range],
  // sigma in [0, 1].
  static PriorBox joint_delay_ell_sigma(double t_range);
};

// Posterior samples with log-weights plus evidence bookkeeping.
struct WeightedSamples {
  Eigen::MatrixXd points;               // one sample per row
  std::vector<double> log_weights;      // unnormalised
  std::vector<double> log_likelihoods;  // per sample
  double logZ = log_zero;
  double logZ_err = 0.0;
  double ess = 0.0;

  int size() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }
  // exp(log_weights - logZ); sums to one.
  std::vector<double> normalized_weights() const;
};

double posterior_mean(const WeightedSamples& samples, int dim_index = 0);
double posterior_sd(const WeightedSamples& samples, int dim_index = 0);
double effective_sample_size(std::span<const double> normalized_weights);

// Resamples every input to equal weights (multinomial, seeded, to its own
// rounded effective sample size) and concatenates the pools.
Eigen::MatrixXd merge_equal_weight(std::span<const WeightedSamples> runs,
                                   std::uint64_t seed);

// 1-D reference posterior by trapezoid quadrature in log space.
// logZ includes the uniform prior factor 1/(hi - lo); density integrates
// to one over [lo, hi].
struct QuadratureResult {
  Eigen::VectorXd grid;
  Eigen::VectorXd density;
  double logZ = log_zero;

  double mean() const;
  double sd() const;
  // Moments of the density restricted to [a, b] (renormalised).
  double restricted_mean(double a, double b) const;
  double restricted_sd(double a, double b) const;
};

QuadratureResult posterior_quadrature(const std::function<double(double)>& loglik,
                                      double lo, double hi, int n_points);

}  // namespace delaygp

#endif
