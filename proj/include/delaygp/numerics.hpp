#ifndef DELAYGP_NUMERICS_HPP
#define DELAYGP_NUMERICS_HPP

#include <cmath>
#include <limits>
#include <span>

namespace delaygp {

// Distinguished "log of zero likelihood" value.  Code must not compare it
// arithmetically against finite log-likelihoods; use is_impossible().
inline constexpr double log_zero = -std::numeric_limits<double>::infinity();

inline bool is_impossible(double log_value) {
  // Catches the sentinel and any NaN that slipped through.
  return !(log_value > log_zero);
}

// log(sum_i exp(x_i)), safe against overflow; log_zero entries contribute 0.
inline double log_sum_exp(std::span<const double> xs) {
  double m = log_zero;
  for (double x : xs)
    if (x > m) m = x;
  if (is_impossible(m)) return log_zero;
  double acc = 0.0;
  for (double x : xs)
    if (!is_impossible(x)) acc += std::exp(x - m);
  return m + std::log(acc);
}

inline double log_add_exp(double a, double b) {
  if (is_impossible(a)) return b;
  if (is_impossible(b)) return a;
  const double m = a > b ? a : b;
  return m + std::log1p(std::exp(-std::fabs(a - b)));
}

// log(1 - exp(-x)) for x > 0, stable for both small and large x.
inline double log1m_exp_neg(double x) {
  return x > 0.6931471805599453 ? std::log1p(-std::exp(-x))
                                : std::log(-std::expm1(-x));
}

}  // namespace delaygp

#endif
