#include "delaygp/types.hpp"

#include <cmath>

namespace delaygp {

void HyperParams::validate() const {
  if (!(amplitude > 0.0))
    throw ConfigError("hyperparameter amplitude must be > 0");
  if (!(length_scale > 0.0))
    throw ConfigError("hyperparameter length_scale must be > 0");
  if (!(noise >= 0.0)) throw ConfigError("hyperparameter noise must be >= 0");
  if (!std::isfinite(delay)) throw ConfigError("delay must be finite");
}

void HyperParams::validate_for(const ObservationGrid& grid) const {
  validate();
  if (std::fabs(delay) > grid.t_range())
    throw ConfigError("delay lies outside [-t_range, t_range]");
}

ObservationGrid::ObservationGrid(Eigen::VectorXd times)
    : times_(std::move(times)) {
  if (times_.size() < 1) throw ConfigError("observation grid is empty");
  for (Eigen::Index i = 0; i + 1 < times_.size(); ++i)
    if (!(times_[i] < times_[i + 1]))
      throw ConfigError("observation times must be strictly increasing");
  if (times_.size() >= 2) {
    const double dt = (t_max() - t_min()) / static_cast<double>(n_data() - 1);
    bool uniform = true;
    for (Eigen::Index i = 0; i + 1 < times_.size(); ++i) {
      if (std::fabs((times_[i + 1] - times_[i]) - dt) > 1e-9 * dt) {
        uniform = false;
        break;
      }
    }
    if (uniform) spacing_ = dt;
  }
}

ObservationGrid ObservationGrid::uniform(int n_data, double t_min,
                                         double t_max) {
  if (n_data < 1) throw ConfigError("n_data must be >= 1");
  if (n_data >= 2 && !(t_min < t_max))
    throw ConfigError("t_min must be < t_max");
  Eigen::VectorXd t(n_data);
  if (n_data == 1) {
    t[0] = t_min;
  } else {
    const double dt = (t_max - t_min) / static_cast<double>(n_data - 1);
    for (int i = 0; i < n_data; ++i) t[i] = t_min + dt * i;
    t[n_data - 1] = t_max;  // exact endpoints
  }
  return ObservationGrid(std::move(t));
}

ObservationGrid ObservationGrid::uniform_window(int n_data, double t_min,
                                                double t_max) {
  if (n_data < 1) throw ConfigError("n_data must be >= 1");
  if (!(t_min < t_max)) throw ConfigError("t_min must be < t_max");
  const double dt = (t_max - t_min) / static_cast<double>(n_data);
  Eigen::VectorXd t(n_data);
  for (int i = 0; i < n_data; ++i) t[i] = t_min + dt * i;
  return ObservationGrid(std::move(t));
}

LightCurvePair::LightCurvePair(Eigen::VectorXd y1_in, Eigen::VectorXd y2_in,
                               ObservationGrid grid_in)
    : y1(std::move(y1_in)), y2(std::move(y2_in)), grid(std::move(grid_in)) {
  if (y1.size() != grid.n_data() || y2.size() != grid.n_data())
    throw ConfigError("light curve length does not match observation grid");
}

Eigen::VectorXd LightCurvePair::concatenated() const {
  Eigen::VectorXd y(2 * n_data());
  y.head(n_data()) = y1;
  y.tail(n_data()) = y2;
  return y;
}

}  // namespace delaygp
