#ifndef DELAYGP_SYNTH_HPP
#define DELAYGP_SYNTH_HPP

#include <cstdint>
#include <vector>

#include "delaygp/types.hpp"

namespace delaygp {

// A batch of i.i.d. synthetic datasets.  Dataset k is drawn with seed
// derive_stream_seed(base_seed, k), so members are reproducible
// independently of each other and of evaluation order.
struct EnsembleSpec {
  HyperParams theta_true;
  ObservationGrid grid;
  int n_datasets = 1;
  std::uint64_t base_seed = 0;
};

// Draws y = L z with L the Cholesky factor of the joint covariance at
// theta_true and z a standard-normal vector from Xoshiro256pp(seed)
// (Box-Muller).  Deterministic in (grid, theta_true, seed).
LightCurvePair sample_pair(const ObservationGrid& grid,
                           const HyperParams& theta_true, std::uint64_t seed);

std::vector<LightCurvePair> sample_ensemble(const EnsembleSpec& spec);

}  // namespace delaygp

#endif
