#ifndef DELAYGP_SMC_HPP
#define DELAYGP_SMC_HPP

#include "delaygp/sampling.hpp"

namespace delaygp {

struct SMCConfig {
  int n_particles = 100;
  double target_ress = 0.5;     // relative ESS steering the beta increments
  int mcmc_steps = 5;           // random-walk moves per particle per stage
  double proposal_scale = 0.125;  // multiplies the empirical covariance
  std::uint64_t seed = 0;

  void validate() const;
};

struct SMCResult {
  WeightedSamples samples;      // equal-weight particles at beta = 1
  std::vector<double> betas;    // ladder including 0 and 1
  std::vector<double> ress;     // achieved relative ESS per increment
  long likelihood_evals = 0;
};

// Adaptive tempered SMC from the uniform prior (beta = 0) to the posterior
// (beta = 1).  Each stage picks delta-beta by bisection so the relative ESS
// of the incremental weights L^{delta beta} matches target_ress (jumping
// straight to 1 when reachable), reweights, resamples systematically, and
// mutates with random-walk Metropolis whose proposal covariance is the
// weighted particle covariance times proposal_scale.
SMCResult smc(const LogLikFn& loglik, const PriorBox& prior,
              const SMCConfig& cfg);

}  // namespace delaygp

#endif
