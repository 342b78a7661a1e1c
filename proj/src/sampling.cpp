#include "delaygp/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "delaygp/rng.hpp"

namespace delaygp {

void PriorBox::validate() const {
  if (lower.size() != upper.size() || lower.empty())
    throw ConfigError("prior box needs matching non-empty bounds");
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (!(lower[i] < upper[i]))
      throw ConfigError("prior box requires lower < upper in every dimension");
}

bool PriorBox::contains(std::span<const double> x) const {
  if (x.size() != lower.size()) return false;
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (x[i] < lower[i] || x[i] > upper[i]) return false;
  return true;
}

double PriorBox::log_volume() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < lower.size(); ++i)
    acc += std::log(upper[i] - lower[i]);
  return acc;
}

PriorBox PriorBox::delay_only(double t_range) {
  return PriorBox{{-t_range}, {t_range}};
}

PriorBox PriorBox::joint_delay_ell_sigma(double t_range) {
  return PriorBox{{-t_range, 0.0, 0.0}, {t_range, t_range, 1.0}};
}

std::vector<double> WeightedSamples::normalized_weights() const {
  std::vector<double> w(log_weights.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = std::exp(log_weights[i] - logZ);
  return w;
}

double posterior_mean(const WeightedSamples& samples, int dim_index) {
  const std::vector<double> w = samples.normalized_weights();
  double acc = 0.0;
  for (int i = 0; i < samples.size(); ++i)
    acc += w[i] * samples.points(i, dim_index);
  return acc;
}

double posterior_sd(const WeightedSamples& samples, int dim_index) {
  const std::vector<double> w = samples.normalized_weights();
  const double mean = posterior_mean(samples, dim_index);
  double acc = 0.0;
  for (int i = 0; i < samples.size(); ++i) {
    const double d = samples.points(i, dim_index) - mean;
    acc += w[i] * d * d;
  }
  return std::sqrt(acc);
}

double effective_sample_size(std::span<const double> normalized_weights) {
  double sum_sq = 0.0;
  for (double w : normalized_weights) sum_sq += w * w;
  return sum_sq > 0.0 ? 1.0 / sum_sq : 0.0;
}

Eigen::MatrixXd merge_equal_weight(std::span<const WeightedSamples> runs,
                                   std::uint64_t seed) {
  if (runs.empty()) throw ConfigError("merge_equal_weight: no runs given");
  const int dim = runs[0].dim();
  std::vector<Eigen::VectorXd> pool;
  Xoshiro256pp rng(seed);
  for (const WeightedSamples& run : runs) {
    if (run.size() == 0) throw ConfigError("merge_equal_weight: empty run");
    if (run.dim() != dim)
      throw ConfigError("merge_equal_weight: dimension mismatch");
    const std::vector<double> w = run.normalized_weights();
    // Resample to the run's effective size, not its raw length, so long
    // runs do not dominate the pool.
    const int n_draw =
        std::max(1, static_cast<int>(std::llround(run.ess)));
    std::vector<double> cdf(w.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      acc += w[i];
      cdf[i] = acc;
    }
    for (int k = 0; k < n_draw; ++k) {
      const double u = rng.next_unit_half_open() * acc;
      const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      const std::size_t idx =
          std::min<std::size_t>(it - cdf.begin(), w.size() - 1);
      pool.push_back(run.points.row(static_cast<int>(idx)));
    }
  }
  Eigen::MatrixXd out(static_cast<int>(pool.size()), dim);
  for (std::size_t i = 0; i < pool.size(); ++i)
    out.row(static_cast<int>(i)) = pool[i];
  return out;
}

QuadratureResult posterior_quadrature(
    const std::function<double(double)>& loglik, double lo, double hi,
    int n_points) {
  if (!(lo < hi)) throw ConfigError("quadrature bounds must satisfy lo < hi");
  if (n_points < 100) throw ConfigError("quadrature needs n_points >= 100");
  QuadratureResult out;
  out.grid.resize(n_points);
  Eigen::VectorXd logf(n_points);
  const double h = (hi - lo) / static_cast<double>(n_points - 1);
  bool any_finite = false;
  for (int i = 0; i < n_points; ++i) {
    out.grid[i] = lo + h * i;
    logf[i] = loglik(out.grid[i]);
    if (!is_impossible(logf[i])) any_finite = true;
  }
  if (!any_finite)
    throw NumericalError("quadrature: likelihood impossible on entire grid");

  // Trapezoid weights h * (1/2, 1, ..., 1, 1/2) in log space.
  std::vector<double> terms(n_points);
  for (int i = 0; i < n_points; ++i) {
    const double lw = std::log(h) + ((i == 0 || i == n_points - 1)
                                         ? std::log(0.5)
                                         : 0.0);
    terms[i] = logf[i] + lw;
  }
  const double log_integral = log_sum_exp(terms);
  out.logZ = log_integral - std::log(hi - lo);
  out.density.resize(n_points);
  for (int i = 0; i < n_points; ++i)
    out.density[i] = std::exp(logf[i] - log_integral);
  return out;
}

namespace {

// Trapezoid moments of the (already normalised) density on [a, b].
void restricted_moments(const QuadratureResult& q, double a, double b,
                        double* mean, double* sd) {
  const int n = static_cast<int>(q.grid.size());
  double mass = 0.0, m1 = 0.0, m2 = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    const double x0 = q.grid[i], x1 = q.grid[i + 1];
    if (x1 < a || x0 > b) continue;
    const double h = x1 - x0;
    const double f0 = q.density[i], f1 = q.density[i + 1];
    mass += 0.5 * h * (f0 + f1);
    m1 += 0.5 * h * (f0 * x0 + f1 * x1);
    m2 += 0.5 * h * (f0 * x0 * x0 + f1 * x1 * x1);
  }
  if (!(mass > 0.0))
    throw NumericalError("quadrature: zero mass in restriction window");
  *mean = m1 / mass;
  const double var = m2 / mass - (*mean) * (*mean);
  *sd = var > 0.0 ? std::sqrt(var) : 0.0;
}

}  // namespace

double QuadratureResult::mean() const {
  double m, s;
  restricted_moments(*this, grid[0], grid[grid.size() - 1], &m, &s);
  return m;
}

double QuadratureResult::sd() const {
  double m, s;
  restricted_moments(*this, grid[0], grid[grid.size() - 1], &m, &s);
  return s;
}

double QuadratureResult::restricted_mean(double a, double b) const {
  double m, s;
  restricted_moments(*this, a, b, &m, &s);
  return m;
}

double QuadratureResult::restricted_sd(double a, double b) const {
  double m, s;
  restricted_moments(*this, a, b, &m, &s);
  return s;
}

}  // namespace delaygp
