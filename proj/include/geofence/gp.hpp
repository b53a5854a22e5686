#pragma once

// Scalar Gaussian-process regression with a squared-exponential kernel and
// i.i.d. Gaussian observation noise.

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace geofence {

struct KernelParams {
  double sigma_f = 1.0;       // signal amplitude, meters
  double length_scale = 1.0;  // seconds
};

inline double se_kernel(double t1, double t2, const KernelParams& p) noexcept;

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

// Factorizes K + sigma_m^2 I once; everything else is triangular solves.
// If the plain factorization fails, jitter of 1e-10, 1e-8, 1e-6 times
// trace/n is added in turn before giving up with Errc::IllConditioned.
class GpSolver {
 public:
  GpSolver(std::span<const double> times, std::span<const double> values, const KernelParams& params,
           double sigma_m);

  // -1/2 y^T A^-1 y - 1/2 log|A| - n/2 log 2 pi, with A = K + sigma_m^2 I.
  double log_marginal_likelihood() const noexcept { return lml_; }

  // d lml / d sigma_f and d lml / d length_scale.
  std::array<double, 2> lml_gradient() const;

  // Latent posterior at t (noise excluded); variance clamped at zero.
  Moments posterior(double t) const;

  const KernelParams& params() const noexcept { return params_; }
  double sigma_m() const noexcept { return sigma_m_; }
  double jitter() const noexcept { return jitter_; }
  std::size_t size() const noexcept { return times_.size(); }
  const std::vector<double>& times() const noexcept { return times_; }
  const Eigen::VectorXd& weights() const noexcept { return alpha_; }

 private:
  std::vector<double> times_;
  KernelParams params_;
  double sigma_m_;
  double jitter_ = 0.0;
  Eigen::MatrixXd chol_;  // lower triangular
  Eigen::VectorXd alpha_;  // A^-1 y
  double lml_ = 0.0;
};

double log_marginal_likelihood(std::span<const double> times, std::span<const double> values,
                               const KernelParams& params, double sigma_m);

inline double se_kernel(double t1, double t2, const KernelParams& p) noexcept {
  const double d = (t1 - t2) / p.length_scale;
  return p.sigma_f * p.sigma_f * std::exp(-0.5 * d * d);
}

}  // namespace geofence
