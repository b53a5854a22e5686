#include "geofence/gp.hpp"

#include <numbers>

#include <fmt/format.h>

#include "geofence/error.hpp"

namespace geofence {

namespace {

constexpr std::array<double, 3> kJitterLadder = {1e-10, 1e-8, 1e-6};

Eigen::MatrixXd kernel_matrix(const std::vector<double>& t, const KernelParams& p) {
  const auto n = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = p.sigma_f * p.sigma_f;
    for (Eigen::Index j = 0; j < i; ++j) k(i, j) = k(j, i) = se_kernel(t[i], t[j], p);
  }
  return k;
}

}  // namespace

GpSolver::GpSolver(std::span<const double> times, std::span<const double> values, const KernelParams& params,
                   double sigma_m)
    : times_(times.begin(), times.end()), params_(params), sigma_m_(sigma_m) {
  const auto n = static_cast<Eigen::Index>(times_.size());
  if (n == 0 || values.size() != times_.size()) {
    throw Error(Errc::NoTrainingData, "gp solver needs matching, non-empty times and values");
  }
  Eigen::MatrixXd a = kernel_matrix(times_, params_);
  a.diagonal().array() += sigma_m_ * sigma_m_;
  const double scale = a.trace() / static_cast<double>(n);

  Eigen::LLT<Eigen::MatrixXd> llt(a);
  auto failed = [&] { return llt.info() != Eigen::Success || !llt.matrixLLT().diagonal().allFinite(); };
  for (std::size_t rung = 0; failed(); ++rung) {
    if (rung == kJitterLadder.size()) {
      throw Error(Errc::IllConditioned, fmt::format("cholesky failed for sigma_f={} l={} n={}", params_.sigma_f,
                                                    params_.length_scale, n));
    }
    jitter_ = kJitterLadder[rung] * scale;
    Eigen::MatrixXd jittered = a;
    jittered.diagonal().array() += jitter_;
    llt.compute(jittered);
  }
  chol_ = llt.matrixL();

  const Eigen::Map<const Eigen::VectorXd> y(values.data(), n);
  alpha_ = llt.solve(y);
  const double log_det = 2.0 * chol_.diagonal().array().log().sum();
  lml_ = -0.5 * y.dot(alpha_) - 0.5 * log_det - 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

std::array<double, 2> GpSolver::lml_gradient() const {
  const auto n = static_cast<Eigen::Index>(times_.size());
  const Eigen::MatrixXd k = kernel_matrix(times_, params_);
  Eigen::MatrixXd a_inv = Eigen::MatrixXd::Identity(n, n);
  chol_.triangularView<Eigen::Lower>().solveInPlace(a_inv);
  chol_.transpose().triangularView<Eigen::Upper>().solveInPlace(a_inv);
  const Eigen::MatrixXd inner = alpha_ * alpha_.transpose() - a_inv;

  const double l = params_.length_scale;
  Eigen::MatrixXd dk_dl(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d = times_[i] - times_[j];
      dk_dl(i, j) = k(i, j) * d * d / (l * l * l);
    }
  }
  const Eigen::MatrixXd dk_dsf = k * (2.0 / params_.sigma_f);
  return {0.5 * inner.cwiseProduct(dk_dsf).sum(), 0.5 * inner.cwiseProduct(dk_dl).sum()};
}

Moments GpSolver::posterior(double t) const {
  const auto n = static_cast<Eigen::Index>(times_.size());
  Eigen::VectorXd k_star(n);
  for (Eigen::Index i = 0; i < n; ++i) k_star[i] = se_kernel(t, times_[i], params_);
  const double mean = k_star.dot(alpha_);
  chol_.triangularView<Eigen::Lower>().solveInPlace(k_star);
  const double var = params_.sigma_f * params_.sigma_f - k_star.squaredNorm();
  return {mean, std::max(var, 0.0)};
}

double log_marginal_likelihood(std::span<const double> times, std::span<const double> values,
                               const KernelParams& params, double sigma_m) {
  return GpSolver(times, values, params, sigma_m).log_marginal_likelihood();
}

}  // namespace geofence
