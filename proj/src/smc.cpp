#include "delaygp/smc.hpp"

#include <algorithm>
#include <cmath>

#include "delaygp/rng.hpp"

namespace delaygp {

namespace {

// Relative ESS of incremental weights exp(delta_beta * logL_j) over equally
// weighted particles.
double relative_ess(std::span<const double> logl, double delta_beta) {
  const std::size_t n = logl.size();
  std::vector<double> lw(n);
  for (std::size_t j = 0; j < n; ++j) {
    lw[j] = is_impossible(logl[j]) ? log_zero : delta_beta * logl[j];
  }
  const double l1 = log_sum_exp(lw);
  for (double& v : lw)
    if (!is_impossible(v)) v *= 2.0;
  const double l2 = log_sum_exp(lw);
  if (is_impossible(l1)) return 0.0;
  return std::exp(2.0 * l1 - l2) / static_cast<double>(n);
}

void systematic_resample(const std::vector<double>& weights,
                         Xoshiro256pp& rng, std::vector<int>* indices) {
  const int n = static_cast<int>(weights.size());
  indices->resize(n);
  double total = 0.0;
  for (double w : weights) total += w;
  const double step = total / n;
  double u = rng.next_unit() * step;  // (0, step]: zero-weight prefixes stay unselected
  double cum = 0.0;
  int j = 0;
  for (int i = 0; i < n; ++i) {
    cum += weights[i];
    while (j < n && u <= cum) {
      (*indices)[j++] = i;
      u += step;
    }
  }
  while (j < n) (*indices)[j++] = n - 1;
}

}  // namespace

void SMCConfig::validate() const {
  if (n_particles < 2) throw ConfigError("smc needs n_particles >= 2");
  if (!(target_ress > 0.0 && target_ress < 1.0))
    throw ConfigError("target_ress must lie in (0, 1)");
  if (mcmc_steps < 1) throw ConfigError("mcmc_steps must be >= 1");
  if (!(proposal_scale > 0.0)) throw ConfigError("proposal_scale must be > 0");
}

SMCResult smc(const LogLikFn& loglik, const PriorBox& prior,
              const SMCConfig& cfg) {
  cfg.validate();
  prior.validate();
  const int dim = prior.dim();
  const int n = cfg.n_particles;
  Xoshiro256pp rng(derive_stream_seed(cfg.seed, 0));
  SMCResult result;

  Eigen::MatrixXd particles(n, dim);
  std::vector<double> logl(n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < dim; ++k)
      particles(i, k) = rng.next_uniform(prior.lower[k], prior.upper[k]);
    logl[i] = loglik(std::span<const double>(particles.row(i).data(), dim));
    ++result.likelihood_evals;
  }
  if (std::all_of(logl.begin(), logl.end(), is_impossible))
    throw ConfigError("smc: no particle with finite likelihood at beta = 0");

  double beta = 0.0;
  double logz = 0.0;
  double err_acc = 0.0;
  result.betas.push_back(0.0);

  std::vector<double> inc_weights(n);
  std::vector<int> ancestry(n);
  Eigen::MatrixXd resampled(n, dim);
  std::vector<double> resampled_logl(n);

  while (beta < 1.0) {
    // Temperature increment by bisection on the relative ESS.
    const double remaining = 1.0 - beta;
    double delta = remaining;
    if (relative_ess(logl, remaining) < cfg.target_ress) {
      double lo = 0.0, hi = remaining;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (relative_ess(logl, mid) >= cfg.target_ress)
          lo = mid;
        else
          hi = mid;
      }
      delta = 0.5 * (lo + hi);
      // Keep the ladder advancing even when the target rESS is unreachable
      // (possible when many particles sit in impossible regions).
      delta = std::max(delta, 1e-8 * remaining);
    }
    beta = std::min(1.0, beta + delta);
    if (remaining - delta < 1e-12) beta = 1.0;
    result.betas.push_back(beta);
    result.ress.push_back(relative_ess(logl, delta));

    // Reweight (particles currently equally weighted).
    std::vector<double> lw(n);
    for (int j = 0; j < n; ++j)
      lw[j] = is_impossible(logl[j]) ? log_zero : delta * logl[j];
    const double log_mean_w =
        log_sum_exp(lw) - std::log(static_cast<double>(n));
    logz += log_mean_w;
    for (int j = 0; j < n; ++j)
      inc_weights[j] =
          is_impossible(lw[j]) ? 0.0 : std::exp(lw[j] - log_mean_w);
    err_acc += std::max(0.0, 1.0 / result.ress.back() - 1.0) / n;

    // Weighted particle covariance before resampling.
    double wsum = 0.0;
    for (double w : inc_weights) wsum += w;
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
    for (int j = 0; j < n; ++j)
      mean += inc_weights[j] * particles.row(j).transpose();
    mean /= wsum;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
    for (int j = 0; j < n; ++j) {
      const Eigen::VectorXd d = particles.row(j).transpose() - mean;
      cov += inc_weights[j] * d * d.transpose();
    }
    cov /= wsum;

    Eigen::MatrixXd prop_chol(dim, dim);
    Eigen::LLT<Eigen::MatrixXd> llt(cov * cfg.proposal_scale);
    if (llt.info() == Eigen::Success) {
      prop_chol = llt.matrixL();
    } else {
      // Collapsed ensemble: fall back to a small diagonal proposal.
      prop_chol.setZero();
      for (int k = 0; k < dim; ++k)
        prop_chol(k, k) =
            1e-6 * (prior.upper[k] - prior.lower[k]) * std::sqrt(cfg.proposal_scale);
    }

    // Systematic resampling every stage.
    systematic_resample(inc_weights, rng, &ancestry);
    for (int j = 0; j < n; ++j) {
      resampled.row(j) = particles.row(ancestry[j]);
      resampled_logl[j] = logl[ancestry[j]];
    }
    particles.swap(resampled);
    logl.swap(resampled_logl);

    // Random-walk Metropolis mutation at the current temperature.
    std::vector<double> proposal(dim);
    Eigen::VectorXd z(dim);
    for (int j = 0; j < n; ++j) {
      for (int step = 0; step < cfg.mcmc_steps; ++step) {
        for (int k = 0; k < dim; ++k) z[k] = rng.next_normal();
        const Eigen::VectorXd jump = prop_chol * z;
        for (int k = 0; k < dim; ++k)
          proposal[k] = particles(j, k) + jump[k];
        if (!prior.contains(proposal)) continue;
        const double l_new = loglik(proposal);
        ++result.likelihood_evals;
        if (is_impossible(l_new)) continue;
        bool accept;
        if (is_impossible(logl[j])) {
          accept = true;
        } else {
          const double log_alpha = beta * (l_new - logl[j]);
          accept = log_alpha >= 0.0 ||
                   std::log(rng.next_unit()) < log_alpha;
        }
        if (accept) {
          for (int k = 0; k < dim; ++k) particles(j, k) = proposal[k];
          logl[j] = l_new;
        }
      }
    }
  }

  WeightedSamples& s = result.samples;
  s.points = particles;
  s.log_likelihoods = logl;
  s.log_weights.assign(n, logz - std::log(static_cast<double>(n)));
  s.logZ = logz;
  s.logZ_err = std::sqrt(err_acc);
  s.ess = static_cast<double>(n);
  return result;
}

}  // namespace delaygp
