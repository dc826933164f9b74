#include "ldf/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ldf {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // log(2*pi)

void check_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw std::invalid_argument(std::string(what) + " must be finite");
  }
}

double gaussian_logpdf(double mean, double variance, double y) {
  const double z = y - mean;
  return -0.5 * (kLog2Pi + std::log(variance)) - 0.5 * z * z / variance;
}

double student_t_logpdf(const StudentT& t, double y) {
  const double z = (y - t.location) / t.scale;
  return std::lgamma(0.5 * (t.dof + 1.0)) - std::lgamma(0.5 * t.dof) -
         0.5 * std::log(t.dof * std::numbers::pi) - std::log(t.scale) -
         0.5 * (t.dof + 1.0) * std::log1p(z * z / t.dof);
}

}  // namespace

double log_sum_exp(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("log_sum_exp: empty input");
  const double m = *std::max_element(x.begin(), x.end());
  if (!std::isfinite(m)) return m;  // all -inf (or a stray inf) propagates
  double sum = 0.0;
  for (double v : x) sum += std::exp(v - m);
  return m + std::log(sum);
}

double weighted_log_sum_exp(std::span<const double> w,
                            std::span<const double> x) {
  if (w.size() != x.size()) {
    throw std::invalid_argument("weighted_log_sum_exp: length mismatch");
  }
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] > 0.0 && x[i] > m) m = x[i];
  }
  if (!std::isfinite(m)) {
    throw std::invalid_argument("weighted_log_sum_exp: no positive weight");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] > 0.0) sum += w[i] * std::exp(x[i] - m);
  }
  return m + std::log(sum);
}

MvGaussian::MvGaussian(Eigen::VectorXd mean, Eigen::MatrixXd covariance)
    : mean_(std::move(mean)), cov_(std::move(covariance)) {
  const auto m = mean_.size();
  if (m == 0) throw std::invalid_argument("MvGaussian: empty mean");
  if (cov_.rows() != m || cov_.cols() != m) {
    throw std::invalid_argument("MvGaussian: covariance shape mismatch");
  }
  if (!cov_.isApprox(cov_.transpose(), 1e-10)) {
    throw std::invalid_argument("MvGaussian: covariance not symmetric");
  }
  cov_ = 0.5 * (cov_ + cov_.transpose().eval());
  llt_.compute(cov_);
  if (llt_.info() != Eigen::Success) {
    const double jitter = 1e-10 * cov_.trace() / static_cast<double>(m);
    cov_.diagonal().array() += jitter;
    llt_.compute(cov_);
    if (llt_.info() != Eigen::Success) {
      throw std::invalid_argument(
          "MvGaussian: covariance not positive definite");
    }
  }
  log_norm_ = -0.5 * static_cast<double>(m) * kLog2Pi -
              llt_.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

double MvGaussian::log_density(const Eigen::VectorXd& y) const {
  if (y.size() != mean_.size()) {
    throw std::invalid_argument("MvGaussian::log_density: dimension mismatch");
  }
  const Eigen::VectorXd z = llt_.matrixL().solve(y - mean_);
  return log_norm_ - 0.5 * z.squaredNorm();
}

PredictiveDensity::PredictiveDensity(Gaussian g) : v_(g) {
  check_finite(g.mean, "Gaussian mean");
  check_finite(g.variance, "Gaussian variance");
  if (g.variance <= 0.0) {
    throw std::invalid_argument("Gaussian variance must be > 0");
  }
}

PredictiveDensity::PredictiveDensity(StudentT t) : v_(t) {
  check_finite(t.location, "StudentT location");
  check_finite(t.scale, "StudentT scale");
  check_finite(t.dof, "StudentT dof");
  if (t.scale <= 0.0) throw std::invalid_argument("StudentT scale must be > 0");
  if (t.dof <= 2.0) throw std::invalid_argument("StudentT dof must be > 2");
}

PredictiveDensity::PredictiveDensity(MvGaussian mv) : v_(std::move(mv)) {}

int PredictiveDensity::dimension() const {
  return visit([](const auto& d) -> int {
    using T = std::decay_t<decltype(d)>;
    if constexpr (std::is_same_v<T, MvGaussian>) {
      return d.dim();
    } else if constexpr (std::is_same_v<T, Mixture>) {
      return d.components.front().dimension();
    } else {
      return 1;
    }
  });
}

double PredictiveDensity::log_density(double y) const {
  return visit([y](const auto& d) -> double {
    using T = std::decay_t<decltype(d)>;
    if constexpr (std::is_same_v<T, Gaussian>) {
      return gaussian_logpdf(d.mean, d.variance, y);
    } else if constexpr (std::is_same_v<T, StudentT>) {
      return student_t_logpdf(d, y);
    } else if constexpr (std::is_same_v<T, MvGaussian>) {
      if (d.dim() != 1) {
        throw std::invalid_argument("log_density: dimension mismatch");
      }
      return d.log_density(Eigen::VectorXd::Constant(1, y));
    } else {
      std::vector<double> logs(d.components.size());
      for (std::size_t j = 0; j < d.components.size(); ++j) {
        logs[j] = d.components[j].log_density(y);
      }
      return weighted_log_sum_exp(d.weights, logs);
    }
  });
}

double PredictiveDensity::log_density(const Eigen::VectorXd& y) const {
  if (const auto* mv = std::get_if<MvGaussian>(&v_)) {
    return mv->log_density(y);
  }
  if (const auto* mix = std::get_if<Mixture>(&v_)) {
    std::vector<double> logs(mix->components.size());
    for (std::size_t j = 0; j < mix->components.size(); ++j) {
      logs[j] = mix->components[j].log_density(y);
    }
    return weighted_log_sum_exp(mix->weights, logs);
  }
  if (y.size() != 1) {
    throw std::invalid_argument("log_density: dimension mismatch");
  }
  return log_density(y[0]);
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> PredictiveDensity::moments()
    const {
  return visit([](const auto& d) -> std::pair<Eigen::VectorXd, Eigen::MatrixXd> {
    using T = std::decay_t<decltype(d)>;
    if constexpr (std::is_same_v<T, Gaussian>) {
      return {Eigen::VectorXd::Constant(1, d.mean),
              Eigen::MatrixXd::Constant(1, 1, d.variance)};
    } else if constexpr (std::is_same_v<T, StudentT>) {
      const double var = d.scale * d.scale * d.dof / (d.dof - 2.0);
      return {Eigen::VectorXd::Constant(1, d.location),
              Eigen::MatrixXd::Constant(1, 1, var)};
    } else if constexpr (std::is_same_v<T, MvGaussian>) {
      return {d.mean(), d.covariance()};
    } else {
      // Law of total variance over the component decomposition.
      const int m = d.components.front().dimension();
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(m);
      Eigen::MatrixXd second = Eigen::MatrixXd::Zero(m, m);
      for (std::size_t j = 0; j < d.components.size(); ++j) {
        auto [mu, cov] = d.components[j].moments();
        mean += d.weights[j] * mu;
        second += d.weights[j] * (cov + mu * mu.transpose());
      }
      return {mean, second - mean * mean.transpose()};
    }
  });
}

std::pair<double, double> PredictiveDensity::moments1d() const {
  if (dimension() != 1) {
    throw std::invalid_argument("moments1d: density is multivariate");
  }
  auto [mean, cov] = moments();
  return {mean[0], cov(0, 0)};
}

PredictiveDensity mixture(std::vector<double> weights,
                          std::vector<PredictiveDensity> components) {
  if (weights.size() != components.size()) {
    throw std::invalid_argument("mixture: weights/components length mismatch");
  }
  if (weights.empty()) throw std::invalid_argument("mixture: empty");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) {
      throw std::invalid_argument("mixture: weights must be nonnegative");
    }
    total += w;
  }
  if (total <= 0.0) {
    throw std::invalid_argument("mixture: all weights zero");
  }
  const int dim = components.front().dimension();
  for (const auto& comp : components) {
    if (comp.dimension() != dim) {
      throw std::invalid_argument("mixture: component dimension mismatch");
    }
  }

  Mixture flat;
  flat.weights.reserve(weights.size());
  flat.components.reserve(components.size());
  for (std::size_t j = 0; j < components.size(); ++j) {
    const double w = weights[j] / total;
    if (w == 0.0) continue;
    if (components[j].is_mixture()) {
      const Mixture& inner = components[j].as_mixture();
      for (std::size_t i = 0; i < inner.components.size(); ++i) {
        const double wi = w * inner.weights[i];
        if (wi == 0.0) continue;
        flat.weights.push_back(wi);
        flat.components.push_back(inner.components[i]);
      }
    } else {
      flat.weights.push_back(w);
      flat.components.push_back(std::move(components[j]));
    }
  }
  if (flat.components.size() == 1) return flat.components.front();
  return PredictiveDensity(std::move(flat));
}

}  // namespace ldf
