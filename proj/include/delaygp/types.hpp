#ifndef DELAYGP_TYPES_HPP
#define DELAYGP_TYPES_HPP

#include <Eigen/Dense>
#include <optional>

#include "delaygp/errors.hpp"

namespace delaygp {

struct ObservationGrid;

// GP hyperparameters theta = (A, ell, sigma, delta_t).
struct HyperParams {
  double amplitude = 1.0;      // A, magnitudes
  double length_scale = 10.0;  // ell, days
  double noise = 0.01;         // sigma, magnitudes
  double delay = 0.0;          // delta t, days

  HyperParams with_delay(double delta_t) const {
    HyperParams out = *this;
    out.delay = delta_t;
    return out;
  }

  void validate() const;
  // Additionally requires |delay| <= grid.t_range().
  void validate_for(const ObservationGrid& grid) const;
};

// Ordered observation times shared by both light curves.
struct ObservationGrid {
  explicit ObservationGrid(Eigen::VectorXd times);
  // Endpoint-inclusive grid: times run from t_min to t_max.
  static ObservationGrid uniform(int n_data, double t_min, double t_max);
  // Observing-window sampling as in the experiments: spacing =
  // (t_max - t_min) / n_data, one point per cadence slot, so the last
  // observation falls one spacing short of t_max.  With the standard window
  // of 10^3 days and n_data = 100 this gives a point every 10 days.
  static ObservationGrid uniform_window(int n_data, double t_min,
                                        double t_max);

  const Eigen::VectorXd& times() const { return times_; }
  int n_data() const { return static_cast<int>(times_.size()); }
  double t_min() const { return times_[0]; }
  double t_max() const { return times_[times_.size() - 1]; }
  double t_range() const { return t_max() - t_min(); }
  // Spacing of an (exactly) uniform grid; empty for irregular sampling.
  std::optional<double> spacing() const { return spacing_; }

 private:
  Eigen::VectorXd times_;
  std::optional<double> spacing_;
};

// Two magnitude series observed on a common grid; y2 trails y1 by the delay.
struct LightCurvePair {
  Eigen::VectorXd y1;
  Eigen::VectorXd y2;
  ObservationGrid grid;

  LightCurvePair(Eigen::VectorXd y1_in, Eigen::VectorXd y2_in,
                 ObservationGrid grid_in);

  int n_data() const { return grid.n_data(); }

  // y = [y1; y2], length 2 * n_data.
  Eigen::VectorXd concatenated() const;
};

}  // namespace delaygp

#endif
