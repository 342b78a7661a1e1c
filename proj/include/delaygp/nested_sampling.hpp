#ifndef DELAYGP_NESTED_SAMPLING_HPP
#define DELAYGP_NESTED_SAMPLING_HPP

#include "delaygp/rng.hpp"
#include "delaygp/sampling.hpp"

namespace delaygp {

struct NSConfig {
  int nlive = 75;
  // Slice steps per replacement.  The convention used throughout the
  // experiments is 5 per sampled dimension.
  int num_repeats = 15;
  double termination_frac = 1e-3;  // live-point evidence fraction
  std::uint64_t seed = 0;
  // Hard cap as a multiple of nlive; 0 means the default of 1000.
  int max_iterations_per_live = 0;

  static NSConfig for_dim(int dim) {
    NSConfig cfg;
    cfg.num_repeats = 5 * dim;
    return cfg;
  }

  void validate() const;
};

struct NSResult {
  WeightedSamples samples;
  int iterations = 0;
  int slice_collapses = 0;     // shrinkage hit machine width
  double information = 0.0;    // H, nats
  bool hit_iteration_cap = false;
};

// Classic nested sampling with slice-sampling replacements.
//
// nlive points start uniform in the box (points with impossible likelihood
// are redrawn).  Each iteration retires the worst live point with prior
// volume exp(-i/nlive) and replaces it, starting from a random surviving
// live point, by num_repeats slice steps constrained to L >= L_min inside
// the box.  Slice directions are random unit vectors in the frame whitened
// by the live-point covariance (the coordinate axis in 1-D), with the
// initial bracket set to the live-point spread along the direction.
// Terminates once the live-point evidence fraction drops below
// termination_frac; remaining live points are then folded in with equal
// prior-volume shares.  logZ_err = sqrt(H / nlive).
NSResult nested_sampling(const LogLikFn& loglik, const PriorBox& prior,
                         const NSConfig& cfg);

// One stepping-out / shrinkage slice move along `direction` restricted to
// the box and to logL >= l_min.  Exposed for direct testing.
struct SliceOutcome {
  std::vector<double> point;
  double loglik = log_zero;
  int evals = 0;
  bool collapsed = false;  // interval shrank to machine width
};

SliceOutcome slice_step(std::span<const double> point, double point_loglik,
                        std::span<const double> direction, double width,
                        const LogLikFn& loglik, double l_min,
                        const PriorBox& prior, Xoshiro256pp& rng);

}  // namespace delaygp

#endif
