#include "delaygp/nested_sampling.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

namespace delaygp {

namespace {

constexpr int kMaxStepOut = 20;  // doubling budget per side

// Meets the constraint: possible and at least l_min.  Plateau likelihoods
// make equality reachable, so >= rather than > keeps the flat case moving.
bool satisfies(double l, double l_min) {
  return !is_impossible(l) && l >= l_min;
}

// Chord of the box through `point` along `direction`: s range with
// point + s * direction inside.
void chord_range(std::span<const double> point,
                 std::span<const double> direction, const PriorBox& prior,
                 double* s_lo, double* s_hi) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < point.size(); ++k) {
    const double d = direction[k];
    if (d == 0.0) continue;
    const double a = (prior.lower[k] - point[k]) / d;
    const double b = (prior.upper[k] - point[k]) / d;
    lo = std::max(lo, std::min(a, b));
    hi = std::min(hi, std::max(a, b));
  }
  *s_lo = lo;
  *s_hi = hi;
}

}  // namespace

void NSConfig::validate() const {
  if (nlive < 2) throw ConfigError("nested sampling needs nlive >= 2");
  if (num_repeats < 1) throw ConfigError("num_repeats must be >= 1");
  if (!(termination_frac > 0.0 && termination_frac < 1.0))
    throw ConfigError("termination_frac must lie in (0, 1)");
}

SliceOutcome slice_step(std::span<const double> point, double point_loglik,
                        std::span<const double> direction, double width,
                        const LogLikFn& loglik, double l_min,
                        const PriorBox& prior, Xoshiro256pp& rng) {
  const int dim = static_cast<int>(point.size());
  SliceOutcome out;
  out.point.assign(point.begin(), point.end());
  out.loglik = point_loglik;

  double s_lo, s_hi;
  chord_range(point, direction, prior, &s_lo, &s_hi);
  if (!(s_hi > s_lo) || !(width > 0.0)) {
    out.collapsed = true;
    return out;
  }

  std::vector<double> trial(dim);
  const auto eval_at = [&](double s) {
    for (int k = 0; k < dim; ++k) trial[k] = point[k] + s * direction[k];
    ++out.evals;
    return loglik(trial);
  };

  // Stepping out.
  double left = -width * rng.next_unit_half_open();
  double right = left + width;
  left = std::max(left, s_lo);
  right = std::min(right, s_hi);
  for (int i = 0; i < kMaxStepOut && left > s_lo; ++i) {
    if (!satisfies(eval_at(left), l_min)) break;
    left = std::max(left - width, s_lo);
  }
  for (int i = 0; i < kMaxStepOut && right < s_hi; ++i) {
    if (!satisfies(eval_at(right), l_min)) break;
    right = std::min(right + width, s_hi);
  }

  // Shrinkage.
  const double scale = std::max({std::fabs(left), std::fabs(right), width});
  while (right - left > 1e-15 * scale) {
    const double s = left + (right - left) * rng.next_unit_half_open();
    const double l = eval_at(s);
    if (satisfies(l, l_min)) {
      for (int k = 0; k < dim; ++k) out.point[k] = point[k] + s * direction[k];
      out.loglik = l;
      return out;
    }
    if (s < 0.0)
      left = s;
    else
      right = s;
  }
  out.collapsed = true;  // give back the input point
  return out;
}

NSResult nested_sampling(const LogLikFn& loglik, const PriorBox& prior,
                         const NSConfig& cfg) {
  cfg.validate();
  prior.validate();
  const int dim = prior.dim();
  const int nlive = cfg.nlive;
  Xoshiro256pp rng(derive_stream_seed(cfg.seed, 0));

  // Initial live points; impossible draws are redrawn with a bounded budget.
  Eigen::MatrixXd live(nlive, dim);
  std::vector<double> live_logl(nlive);
  for (int i = 0; i < nlive; ++i) {
    bool ok = false;
    for (int attempt = 0; attempt < 1000; ++attempt) {
      for (int k = 0; k < dim; ++k)
        live(i, k) = rng.next_uniform(prior.lower[k], prior.upper[k]);
      const double l =
          loglik(std::span<const double>(live.row(i).data(), dim));
      if (!is_impossible(l)) {
        live_logl[i] = l;
        ok = true;
        break;
      }
    }
    if (!ok)
      throw ConfigError(
          "nested sampling: could not draw a live point with finite "
          "likelihood from the prior");
  }

  NSResult result;
  std::vector<Eigen::VectorXd> dead_points;
  std::vector<double> dead_logl;
  std::vector<double> dead_logw;
  double logz_dead = log_zero;

  const double log_shell = log1m_exp_neg(1.0 / nlive);  // log(1 - e^{-1/n})
  const int cap =
      nlive * (cfg.max_iterations_per_live > 0 ? cfg.max_iterations_per_live
                                               : 1000);

  std::vector<double> row_buffer(dim);
  Eigen::VectorXd mean(dim);
  Eigen::MatrixXd cov(dim, dim);
  Eigen::MatrixXd cov_chol(dim, dim);

  int iter = 0;
  for (;;) {
    ++iter;
    // Worst live point.
    int worst = 0;
    for (int i = 1; i < nlive; ++i)
      if (live_logl[i] < live_logl[worst]) worst = i;
    const double l_min = live_logl[worst];

    const double log_x = -static_cast<double>(iter) / nlive;
    const double log_dx = log_x + 1.0 / nlive + log_shell;  // X_{i-1}-X_i
    dead_points.emplace_back(live.row(worst));
    dead_logl.push_back(l_min);
    dead_logw.push_back(l_min + log_dx);
    logz_dead = log_add_exp(logz_dead, dead_logw.back());

    // Whitening frame from the live-point covariance, refreshed per
    // iteration.
    mean = live.colwise().mean();
    Eigen::MatrixXd centered = live.rowwise() - mean.transpose();
    cov = centered.transpose() * centered / static_cast<double>(nlive - 1);
    Eigen::LLT<Eigen::MatrixXd> cov_llt(cov);
    const bool have_frame = cov_llt.info() == Eigen::Success;
    if (have_frame) cov_chol = cov_llt.matrixL();

    // Replacement: slice chain seeded from a random surviving live point.
    int seed_idx = worst;
    if (nlive > 1) {
      seed_idx = static_cast<int>(rng.next_below(nlive - 1));
      if (seed_idx >= worst) ++seed_idx;
    }
    std::vector<double> current(dim);
    for (int k = 0; k < dim; ++k) current[k] = live(seed_idx, k);
    double current_logl = live_logl[seed_idx];

    std::vector<double> direction(dim);
    for (int r = 0; r < cfg.num_repeats; ++r) {
      double width;
      if (dim == 1) {
        direction[0] = 1.0;
        width = std::sqrt(std::max(cov(0, 0), 0.0));
      } else {
        Eigen::VectorXd u(dim);
        double norm2 = 0.0;
        do {
          for (int k = 0; k < dim; ++k) u[k] = rng.next_normal();
          norm2 = u.squaredNorm();
        } while (!(norm2 > 0.0));
        Eigen::VectorXd d = have_frame ? Eigen::VectorXd(cov_chol * u) : u;
        const double dn = d.norm();
        if (!(dn > 0.0)) d = u;
        d /= d.norm();
        for (int k = 0; k < dim; ++k) direction[k] = d[k];
        width = std::sqrt(std::max((d.transpose() * cov * d)(0, 0), 0.0));
      }
      if (!(width > 0.0)) {
        // Degenerate ensemble; fall back to a box-scale bracket.
        double span = 0.0;
        for (int k = 0; k < dim; ++k)
          span += (prior.upper[k] - prior.lower[k]) *
                  (prior.upper[k] - prior.lower[k]);
        width = 1e-3 * std::sqrt(span);
      }
      SliceOutcome step = slice_step(current, current_logl, direction, width,
                                     loglik, l_min, prior, rng);
      if (step.collapsed) ++result.slice_collapses;
      current = std::move(step.point);
      current_logl = step.loglik;
    }
    assert(satisfies(current_logl, l_min));
    for (int k = 0; k < dim; ++k) live(worst, k) = current[k];
    live_logl[worst] = current_logl;

    // Termination: live evidence fraction below threshold.
    const double logz_live =
        log_sum_exp(live_logl) - std::log(static_cast<double>(nlive)) + log_x;
    const double logz_total = log_add_exp(logz_dead, logz_live);
    if (logz_live - logz_total < std::log(cfg.termination_frac)) break;
    if (iter >= cap) {
      result.hit_iteration_cap = true;
      break;
    }
  }
  result.iterations = iter;

  // Fold the remaining live points in with equal prior-volume shares,
  // ordered by likelihood for reproducibility.
  const double log_x_end = -static_cast<double>(iter) / nlive;
  std::vector<int> order(nlive);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return live_logl[a] < live_logl[b]; });
  for (int idx : order) {
    dead_points.emplace_back(live.row(idx));
    dead_logl.push_back(live_logl[idx]);
    dead_logw.push_back(live_logl[idx] + log_x_end -
                        std::log(static_cast<double>(nlive)));
  }

  // Assemble weighted samples.
  const int total = static_cast<int>(dead_points.size());
  WeightedSamples& s = result.samples;
  s.points.resize(total, dim);
  for (int i = 0; i < total; ++i) s.points.row(i) = dead_points[i];
  s.log_likelihoods = dead_logl;
  s.log_weights = dead_logw;
  s.logZ = log_sum_exp(dead_logw);

  double information = 0.0;
  std::vector<double> norm(total);
  for (int i = 0; i < total; ++i) {
    norm[i] = std::exp(dead_logw[i] - s.logZ);
    if (norm[i] > 0.0 && !is_impossible(dead_logl[i]))
      information += norm[i] * dead_logl[i];
  }
  information -= s.logZ;
  result.information = std::max(information, 0.0);
  s.logZ_err = std::sqrt(result.information / nlive);
  s.ess = effective_sample_size(norm);
  return result;
}

}  // namespace delaygp
