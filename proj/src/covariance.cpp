#include "delaygp/covariance.hpp"

#include <cmath>
#include <vector>

#include "delaygp/kernel.hpp"

namespace delaygp {

namespace {

// Fills M_ij = A^2 exp(-|t_i - t_j - shift| / ell).  On a uniform grid the
// entries depend on i - j only, so only 2n - 1 exponentials are needed; that
// path dominates sampler runtime.
Eigen::MatrixXd shifted_kernel_matrix(const ObservationGrid& grid,
                                      double amplitude, double length_scale,
                                      double shift) {
  const int n = grid.n_data();
  const Eigen::VectorXd& t = grid.times();
  const double a2 = amplitude * amplitude;
  Eigen::MatrixXd m(n, n);
  if (auto dt = grid.spacing()) {
    std::vector<double> diag_value(2 * n - 1);
    for (int d = -(n - 1); d <= n - 1; ++d)
      diag_value[d + n - 1] =
          a2 * std::exp(-std::fabs(d * (*dt) - shift) / length_scale);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) m(i, j) = diag_value[i - j + n - 1];
  } else {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        m(i, j) = a2 * std::exp(-std::fabs(t[i] - t[j] - shift) / length_scale);
  }
  return m;
}

}  // namespace

Eigen::MatrixXd kernel_matrix(const Eigen::VectorXd& s,
                              const Eigen::VectorXd& t, double amplitude,
                              double length_scale) {
  Eigen::MatrixXd m(s.size(), t.size());
  for (Eigen::Index j = 0; j < t.size(); ++j)
    for (Eigen::Index i = 0; i < s.size(); ++i)
      m(i, j) = kernel_eval(s[i], t[j], amplitude, length_scale);
  return m;
}

Eigen::MatrixXd kernel_gram(const ObservationGrid& grid, double amplitude,
                            double length_scale) {
  if (!(amplitude > 0.0) || !(length_scale > 0.0))
    throw ConfigError("kernel requires amplitude > 0 and length_scale > 0");
  // Bitwise symmetric: fabs(t_i - t_j) == fabs(t_j - t_i) exactly.
  return shifted_kernel_matrix(grid, amplitude, length_scale, 0.0);
}

Eigen::MatrixXd auto_covariance(const ObservationGrid& grid,
                                const HyperParams& theta) {
  Eigen::MatrixXd m = kernel_gram(grid, theta.amplitude, theta.length_scale);
  m.diagonal().array() += theta.noise * theta.noise;
  return m;
}

Eigen::MatrixXd cross_covariance(const ObservationGrid& grid,
                                 const HyperParams& theta) {
  return shifted_kernel_matrix(grid, theta.amplitude, theta.length_scale,
                               theta.delay);
}

JointCovariance build_joint_covariance(const ObservationGrid& grid,
                                       const HyperParams& theta) {
  const int n = grid.n_data();
  const Eigen::MatrixXd auto_block = auto_covariance(grid, theta);
  const Eigen::MatrixXd cross = cross_covariance(grid, theta);
  JointCovariance joint;
  joint.n_data = n;
  joint.matrix.resize(2 * n, 2 * n);
  joint.matrix.topLeftCorner(n, n) = auto_block;
  joint.matrix.bottomRightCorner(n, n) = auto_block;
  joint.matrix.bottomLeftCorner(n, n) = cross;
  joint.matrix.topRightCorner(n, n) = cross.transpose();
  return joint;
}

}  // namespace delaygp
