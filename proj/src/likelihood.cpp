#include "delaygp/likelihood.hpp"

#include <cmath>
#include <numbers>

#include "delaygp/covariance.hpp"

namespace delaygp {

namespace {
constexpr double log_2pi = 1.8378770664093454836;

double log_det_from_llt(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}
}  // namespace

double gaussian_log_density(const Eigen::VectorXd& y, const Eigen::MatrixXd& k,
                            double jitter) {
  Eigen::MatrixXd m = k;
  if (jitter != 0.0) m.diagonal().array() += jitter;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) return log_zero;
  const Eigen::VectorXd alpha = llt.solve(y);
  const double quad = y.dot(alpha);
  return -0.5 * quad - 0.5 * log_det_from_llt(llt) -
         0.5 * static_cast<double>(y.size()) * log_2pi;
}

double log_likelihood(const LightCurvePair& pair, const HyperParams& theta,
                      double jitter) {
  theta.validate();
  const JointCovariance joint = build_joint_covariance(pair.grid, theta);
  return gaussian_log_density(pair.concatenated(), joint.matrix, jitter);
}

double single_curve_log_likelihood(const Eigen::VectorXd& y,
                                   const ObservationGrid& grid,
                                   const HyperParams& theta) {
  return gaussian_log_density(y, auto_covariance(grid, theta));
}

PredictiveDecomposition predictive_decomposition(const LightCurvePair& pair,
                                                 const HyperParams& theta) {
  theta.validate();
  const int n = pair.n_data();
  PredictiveDecomposition out;

  const Eigen::MatrixXd auto_block = auto_covariance(pair.grid, theta);
  Eigen::LLT<Eigen::MatrixXd> auto_llt(auto_block);
  if (auto_llt.info() != Eigen::Success) return out;

  const Eigen::MatrixXd cross = cross_covariance(pair.grid, theta);
  out.mean = cross * auto_llt.solve(pair.y1);
  // K_{y2|y1} = auto - cross auto^{-1} cross^T via V = L^{-1} cross^T.
  const Eigen::MatrixXd v =
      auto_llt.matrixL().solve(Eigen::MatrixXd(cross.transpose()));
  out.cov = auto_block - v.transpose() * v;

  Eigen::LLT<Eigen::MatrixXd> cond_llt(out.cov);
  if (cond_llt.info() != Eigen::Success) return out;
  const Eigen::VectorXd r = pair.y2 - out.mean;
  out.chi2 = r.dot(cond_llt.solve(r));
  out.penalty = log_det_from_llt(cond_llt);
  out.log_pred =
      -0.5 * out.chi2 - 0.5 * out.penalty - 0.5 * static_cast<double>(n) * log_2pi;
  return out;
}

DelayLogLikelihood::DelayLogLikelihood(LightCurvePair pair, HyperParams base)
    : pair_(std::move(pair)), base_(base) {
  base_.validate();
  auto_block_ = auto_covariance(pair_.grid, base_);
  auto_llt_.compute(auto_block_);
  if (auto_llt_.info() != Eigen::Success)
    throw NumericalError(
        "auto covariance block is not positive definite; cannot condition");
  alpha_ = auto_llt_.solve(pair_.y1);
  log_det_auto_ = log_det_from_llt(auto_llt_);
  const int n = pair_.n_data();
  log_p_y1_ = -0.5 * pair_.y1.dot(alpha_) - 0.5 * log_det_auto_ -
              0.5 * static_cast<double>(n) * log_2pi;
}

double DelayLogLikelihood::operator()(double delta_t) const {
  const int n = pair_.n_data();
  const Eigen::MatrixXd cross =
      cross_covariance(pair_.grid, base_.with_delay(delta_t));
  const Eigen::MatrixXd v =
      auto_llt_.matrixL().solve(Eigen::MatrixXd(cross.transpose()));
  Eigen::MatrixXd cond = auto_block_ - v.transpose() * v;
  Eigen::LLT<Eigen::MatrixXd> cond_llt(cond);
  if (cond_llt.info() != Eigen::Success) return log_zero;
  const Eigen::VectorXd r = pair_.y2 - cross * alpha_;
  const double chi2 = r.dot(cond_llt.solve(r));
  const double log_pred = -0.5 * chi2 - 0.5 * log_det_from_llt(cond_llt) -
                          0.5 * static_cast<double>(n) * log_2pi;
  return log_pred + log_p_y1_;
}

Eigen::VectorXd whiten(const Eigen::VectorXd& series) {
  const Eigen::Index n = series.size();
  if (n < 2) throw ConfigError("whitening requires at least two samples");
  const double mean = series.mean();
  const double ssq = (series.array() - mean).square().sum();
  const double sd = std::sqrt(ssq / static_cast<double>(n - 1));
  if (!(sd > 0.0))
    throw ConfigError("cannot whiten a constant series (zero variance)");
  return (series.array() - mean) / sd;
}

}  // namespace delaygp
