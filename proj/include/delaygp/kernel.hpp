#ifndef DELAYGP_KERNEL_HPP
#define DELAYGP_KERNEL_HPP

#include <cmath>

#include "delaygp/errors.hpp"

namespace delaygp {

// Exponential covariance A^2 exp(-|t - t'| / ell), the damped-random-walk
// kernel.  Stationary: depends on t - t' only.
inline double kernel_eval(double t, double t_prime, double amplitude,
                          double length_scale) {
  if (!(amplitude > 0.0) || !(length_scale > 0.0))
    throw ConfigError("kernel requires amplitude > 0 and length_scale > 0");
  return amplitude * amplitude *
         std::exp(-std::fabs(t - t_prime) / length_scale);
}

}  // namespace delaygp

#endif
