#ifndef DELAYGP_COVARIANCE_HPP
#define DELAYGP_COVARIANCE_HPP

#include <Eigen/Dense>

#include "delaygp/types.hpp"

namespace delaygp {

// [K(s, t)]_ij = k(s_i, t_j) for the exponential kernel.
Eigen::MatrixXd kernel_matrix(const Eigen::VectorXd& s,
                              const Eigen::VectorXd& t, double amplitude,
                              double length_scale);

// K(t, t) without noise.
Eigen::MatrixXd kernel_gram(const ObservationGrid& grid, double amplitude,
                            double length_scale);

// Auto block K(t, t) + sigma^2 I.
Eigen::MatrixXd auto_covariance(const ObservationGrid& grid,
                                const HyperParams& theta);

// Cross block cov(y2, y1): entry (i, j) = k(t_i - delay, t_j).
Eigen::MatrixXd cross_covariance(const ObservationGrid& grid,
                                 const HyperParams& theta);

// 2n x 2n covariance of [y1; y2].  Off-diagonal blocks are exact transposes
// of one another and the auto blocks are filled symmetrically, so the matrix
// is bitwise symmetric.
struct JointCovariance {
  Eigen::MatrixXd matrix;
  int n_data = 0;
};

JointCovariance build_joint_covariance(const ObservationGrid& grid,
                                       const HyperParams& theta);

}  // namespace delaygp

#endif
