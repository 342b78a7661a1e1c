#include "delaygp/synth.hpp"

#include "delaygp/covariance.hpp"
#include "delaygp/rng.hpp"

namespace delaygp {

LightCurvePair sample_pair(const ObservationGrid& grid,
                           const HyperParams& theta_true, std::uint64_t seed) {
  theta_true.validate();
  const JointCovariance joint = build_joint_covariance(grid, theta_true);
  Eigen::LLT<Eigen::MatrixXd> llt(joint.matrix);
  if (llt.info() != Eigen::Success)
    throw NumericalError(
        "joint covariance at theta_true is not positive definite; "
        "use noise > 0 to sample data");
  const int n = grid.n_data();
  Xoshiro256pp rng(seed);
  Eigen::VectorXd z(2 * n);
  for (int i = 0; i < 2 * n; ++i) z[i] = rng.next_normal();
  const Eigen::VectorXd y = llt.matrixL() * z;
  return LightCurvePair(y.head(n), y.tail(n), grid);
}

std::vector<LightCurvePair> sample_ensemble(const EnsembleSpec& spec) {
  if (spec.n_datasets < 1) throw ConfigError("n_datasets must be >= 1");
  std::vector<LightCurvePair> out;
  out.reserve(spec.n_datasets);
  for (int k = 0; k < spec.n_datasets; ++k)
    out.push_back(sample_pair(
        spec.grid, spec.theta_true,
        derive_stream_seed(spec.base_seed, static_cast<std::uint64_t>(k))));
  return out;
}

}  // namespace delaygp
