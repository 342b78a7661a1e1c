#ifndef DELAYGP_LIKELIHOOD_HPP
#define DELAYGP_LIKELIHOOD_HPP

#include <Eigen/Dense>

#include "delaygp/numerics.hpp"
#include "delaygp/types.hpp"

namespace delaygp {

// log N(y; 0, K) computed through a Cholesky factorisation of K.
// Returns log_zero when K is numerically non-positive-definite; never throws
// for that case, matching the sampler contract of skipping such regions.
// `jitter` is added to the diagonal before factorising; paper reproductions
// run with the default 0 so the log_zero path stays live.
double gaussian_log_density(const Eigen::VectorXd& y, const Eigen::MatrixXd& k,
                            double jitter = 0.0);

// Joint log-likelihood of the concatenated pair under theta.
double log_likelihood(const LightCurvePair& pair, const HyperParams& theta,
                      double jitter = 0.0);

// log N(y1; 0, K(t,t) + sigma^2 I): the delay-independent first factor.
double single_curve_log_likelihood(const Eigen::VectorXd& y,
                                   const ObservationGrid& grid,
                                   const HyperParams& theta);

// Conditional factorisation p(y2 | y1): interpolate y1, look at the
// interpolant at the delay-shifted times and score y2 against it.
// chi2 measures goodness of fit, penalty = log |K_{y2|y1}| the model
// complexity.  log_pred = -chi2/2 - penalty/2 - (n/2) log 2pi.
struct PredictiveDecomposition {
  Eigen::VectorXd mean;  // m_{y2|y1}
  Eigen::MatrixXd cov;   // K_{y2|y1}
  double chi2 = 0.0;
  double penalty = 0.0;
  double log_pred = log_zero;

  bool impossible() const { return is_impossible(log_pred); }
};

PredictiveDecomposition predictive_decomposition(const LightCurvePair& pair,
                                                 const HyperParams& theta);

// log-likelihood as a function of the delay with (A, ell, sigma) fixed.
// Caches the Cholesky factor of the auto block, which the delay does not
// touch, so a scan or a 1-D sampler pays one n x n factorisation per call
// instead of the full 2n x 2n one.  Immutable after construction; safe to
// call concurrently.
class DelayLogLikelihood {
 public:
  DelayLogLikelihood(LightCurvePair pair, HyperParams base);

  double operator()(double delta_t) const;

  const LightCurvePair& pair() const { return pair_; }
  const HyperParams& base() const { return base_; }
  double log_p_y1() const { return log_p_y1_; }

 private:
  LightCurvePair pair_;
  HyperParams base_;
  Eigen::MatrixXd auto_block_;
  Eigen::LLT<Eigen::MatrixXd> auto_llt_;
  Eigen::VectorXd alpha_;  // (K + sigma^2 I)^{-1} y1
  double log_det_auto_ = 0.0;
  double log_p_y1_ = log_zero;
};

// Standardise a series to sample mean 0 and sample (n-1) standard
// deviation 1.  Throws ConfigError for length < 2 or a constant series.
Eigen::VectorXd whiten(const Eigen::VectorXd& series);

}  // namespace delaygp

#endif
