#include "delaygp/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "delaygp/covariance.hpp"
#include "delaygp/parallel.hpp"

namespace delaygp {

namespace {

constexpr double log_2pi = 1.8378770664093454836;

double log_det_from_llt(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

// log |M| of a symmetric positive definite matrix; log_zero if Cholesky
// fails.
double log_det_spd(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) return log_zero;
  return log_det_from_llt(llt);
}

}  // namespace

AveragedLogLik averaged_loglik(const ObservationGrid& grid,
                               const HyperParams& theta_model,
                               const HyperParams& theta_true) {
  theta_model.validate();
  theta_true.validate();
  AveragedLogLik out;
  const Eigen::MatrixXd k_model = build_joint_covariance(grid, theta_model).matrix;
  const Eigen::MatrixXd k_true = build_joint_covariance(grid, theta_true).matrix;
  const int n = static_cast<int>(k_model.rows());

  Eigen::LLT<Eigen::MatrixXd> llt(k_model);
  if (llt.info() != Eigen::Success) {
    out.var_exact = std::numeric_limits<double>::quiet_NaN();
    out.var_paper = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const Eigen::MatrixXd m = llt.solve(k_true);  // K_model^-1 K_true
  out.e_loglik = -0.5 * m.trace() -
                 0.5 * (log_det_from_llt(llt) + n * log_2pi);
  out.var_exact = 0.5 * m.cwiseProduct(m.transpose()).sum();  // Tr(M M)

  const Eigen::MatrixXd inv =
      llt.solve(Eigen::MatrixXd::Identity(n, n));
  double acc = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      acc += inv(i, j) *
             (k_true(i, i) * k_true(j, j) + k_true(j, i) * k_true(j, i));
  out.var_paper = 0.25 * acc;
  return out;
}

double regularised_averaged_loglik(const ObservationGrid& grid, double delta_t,
                                   const HyperParams& theta_base,
                                   const HyperParams& theta_true,
                                   double decorr_delay) {
  if (decorr_delay <= 0.0) decorr_delay = grid.t_range();
  const HyperParams theta_model = theta_base.with_delay(delta_t);
  const HyperParams theta_decorr = theta_true.with_delay(decorr_delay);
  const AveragedLogLik term_data =
      averaged_loglik(grid, theta_model, theta_true);
  const AveragedLogLik term_decorr =
      averaged_loglik(grid, theta_model, theta_decorr);
  if (term_data.impossible() || term_decorr.impossible()) return log_zero;
  return term_data.e_loglik - term_decorr.e_loglik;
}

std::vector<ScanRow> averaged_scan(const ObservationGrid& grid,
                                   const HyperParams& theta_true,
                                   std::span<const double> delta_t_grid,
                                   int n_threads, double decorr_delay) {
  if (delta_t_grid.empty()) throw ConfigError("delta_t scan grid is empty");
  theta_true.validate();
  if (decorr_delay <= 0.0) decorr_delay = grid.t_range();
  const Eigen::MatrixXd k_true = build_joint_covariance(grid, theta_true).matrix;
  const Eigen::MatrixXd k_decorr =
      build_joint_covariance(grid, theta_true.with_delay(decorr_delay))
          .matrix;
  const int n = static_cast<int>(k_true.rows());

  std::vector<ScanRow> rows(delta_t_grid.size());
  parallel_for(
      delta_t_grid.size(),
      [&](std::size_t idx) {
        const double delta_t = delta_t_grid[idx];
        ScanRow& row = rows[idx];
        row.delta_t = delta_t;
        const Eigen::MatrixXd k_model =
            build_joint_covariance(grid, theta_true.with_delay(delta_t))
                .matrix;
        Eigen::LLT<Eigen::MatrixXd> llt(k_model);
        if (llt.info() != Eigen::Success) {
          row.e_loglik = log_zero;
          row.sd_exact = std::numeric_limits<double>::quiet_NaN();
          row.sd_paper = std::numeric_limits<double>::quiet_NaN();
          row.e_loglik_reg = log_zero;
          return;
        }
        const Eigen::MatrixXd m = llt.solve(k_true);
        const double log_det = log_det_from_llt(llt);
        row.e_loglik = -0.5 * m.trace() - 0.5 * (log_det + n * log_2pi);
        row.sd_exact =
            std::sqrt(0.5 * m.cwiseProduct(m.transpose()).sum());
        const Eigen::MatrixXd inv =
            llt.solve(Eigen::MatrixXd::Identity(n, n));
        double acc = 0.0;
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < n; ++i)
            acc += inv(i, j) * (k_true(i, i) * k_true(j, j) +
                                k_true(j, i) * k_true(j, i));
        row.sd_paper = acc >= 0.0 ? std::sqrt(0.25 * acc)
                                  : std::numeric_limits<double>::quiet_NaN();
        // Shared model covariance: the log-determinants cancel.
        const Eigen::MatrixXd m_dec = llt.solve(k_decorr);
        row.e_loglik_reg = -0.5 * (m.trace() - m_dec.trace());
      },
      n_threads);
  return rows;
}

LikelihoodMoments averaged_likelihood_moments(const ObservationGrid& grid,
                                              const HyperParams& theta_model,
                                              const HyperParams& theta_true) {
  theta_model.validate();
  theta_true.validate();
  LikelihoodMoments out;
  const Eigen::MatrixXd k_model = build_joint_covariance(grid, theta_model).matrix;
  const Eigen::MatrixXd k_true = build_joint_covariance(grid, theta_true).matrix;
  const int n = static_cast<int>(k_model.rows());

  const double ld_sum = log_det_spd(k_model + k_true);
  if (is_impossible(ld_sum)) return out;
  out.log_e_l = -0.5 * (n * log_2pi + ld_sum);

  // |K_model (K_model + 2K_true)| = |K_model| |K_model + 2 K_true|.
  const double ld_model = log_det_spd(k_model);
  const double ld_mix = log_det_spd(k_model + 2.0 * k_true);
  if (is_impossible(ld_model) || is_impossible(ld_mix)) return out;
  // |4 pi^2 M|^(1/2): log(4 pi^2) = 2 log 2pi.
  out.log_e_l2 = -0.5 * (n * 2.0 * log_2pi + ld_model + ld_mix);
  return out;
}

LikelihoodMoments moments_closed_form_zero_delay(const ObservationGrid& grid,
                                                 const HyperParams& theta) {
  theta.validate();
  if (!(theta.noise > 0.0))
    throw ConfigError("zero-delay closed form requires noise > 0");
  LikelihoodMoments out;
  const int n_data = grid.n_data();
  const int n = 2 * n_data;
  const Eigen::MatrixXd k0 =
      kernel_gram(grid, theta.amplitude, theta.length_scale);
  Eigen::MatrixXd two_k0 = 2.0 * k0;
  two_k0.diagonal().array() += theta.noise * theta.noise;
  const double ld = log_det_spd(two_k0);
  if (is_impossible(ld)) return out;
  const double log_sigma = std::log(theta.noise);
  // log(4 pi) = log 2pi + log 2; log(12 pi^2) = 2 log 2pi + log 3.
  out.log_e_l =
      -0.5 * n * (log_2pi + std::log(2.0)) - n_data * log_sigma - 0.5 * ld;
  out.log_e_l2 = -0.5 * n * (2.0 * log_2pi + std::log(3.0)) -
                 2.0 * n_data * log_sigma - ld;
  return out;
}

SpectrumReport bayes_factor_spectrum(const ObservationGrid& grid,
                                     double amplitude, double length_scale,
                                     double noise) {
  const Eigen::MatrixXd k0 = kernel_gram(grid, amplitude, length_scale);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(k0,
                                                        Eigen::EigenvaluesOnly);
  const Eigen::VectorXd kappa = solver.eigenvalues();
  SpectrumReport report;
  report.rho.reserve(2 * kappa.size());
  const double s2 = noise * noise;
  for (Eigen::Index i = 0; i < kappa.size(); ++i) {
    const double c = kappa[i] / (kappa[i] + s2);
    report.rho.push_back(1.0 - 2.0 * c);
    report.rho.push_back(1.0 + 2.0 * c);
  }
  std::sort(report.rho.begin(), report.rho.end());
  report.min_rho = report.rho.front();
  report.is_positive_definite = report.min_rho > 0.0;
  return report;
}

double largescale_length_loglik(double ell, double ell_true, double dt) {
  if (!(ell > 0.0) || !(ell_true > 0.0) || !(dt > 0.0))
    throw ConfigError("largescale_length_loglik requires positive arguments");
  const double a = std::exp(-dt / ell);
  const double b = std::exp(-dt / ell_true);
  const double one_minus_a2 = -std::expm1(-2.0 * dt / ell);  // 1 - a^2
  if (!(one_minus_a2 > 0.0))
    throw ConfigError("length scale too large: 1 - a^2 underflows to zero");
  return -0.5 * ((1.0 + a * a - 2.0 * a * b) / one_minus_a2 +
                 std::log(one_minus_a2) + log_2pi);
}

std::vector<std::pair<double, double>> condition_number_scan(
    const ObservationGrid& grid, const HyperParams& theta_base,
    std::span<const double> delta_t_grid, int n_threads) {
  theta_base.validate();
  std::vector<std::pair<double, double>> out(delta_t_grid.size());
  parallel_for(
      delta_t_grid.size(),
      [&](std::size_t idx) {
        const double delta_t = delta_t_grid[idx];
        const Eigen::MatrixXd k =
            build_joint_covariance(grid, theta_base.with_delay(delta_t))
                .matrix;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
            k, Eigen::EigenvaluesOnly);
        const double lo = solver.eigenvalues().minCoeff();
        const double hi = solver.eigenvalues().maxCoeff();
        const double cond = (lo > 1e-300)
                                ? hi / lo
                                : std::numeric_limits<double>::infinity();
        out[idx] = {delta_t, cond};
      },
      n_threads);
  return out;
}

}  // namespace delaygp
