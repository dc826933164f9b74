#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace ldf {

class PredictiveDensity;

struct Gaussian {
  double mean = 0.0;
  double variance = 1.0;
};

struct StudentT {
  double location = 0.0;
  double scale = 1.0;
  double dof = 20.0;  // > 2 so the variance is finite
};

// Multivariate Gaussian with the Cholesky factor cached at construction.
// A factorisation failure triggers a single jitter of 1e-10 * trace / m on
// the diagonal; a second failure is an error.
class MvGaussian {
 public:
  MvGaussian(Eigen::VectorXd mean, Eigen::MatrixXd covariance);

  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& covariance() const { return cov_; }
  int dim() const { return static_cast<int>(mean_.size()); }

  double log_density(const Eigen::VectorXd& y) const;

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double log_norm_ = 0.0;  // -(m/2) log(2*pi) - sum(log(diag(L)))
};

struct Mixture {
  std::vector<double> weights;             // simplex
  std::vector<PredictiveDensity> components;  // homogeneous dimension, never nested
};

// One-step-ahead forecast distribution. Immutable after construction; safe
// to share across threads.
class PredictiveDensity {
 public:
  PredictiveDensity() : v_(Gaussian{}) {}
  PredictiveDensity(Gaussian g);      // NOLINT(google-explicit-constructor)
  PredictiveDensity(StudentT t);      // NOLINT(google-explicit-constructor)
  PredictiveDensity(MvGaussian mv);   // NOLINT(google-explicit-constructor)

  // Dimension of the outcome space (1 for the univariate variants).
  int dimension() const;

  double log_density(double y) const;
  double log_density(const Eigen::VectorXd& y) const;

  // Exact first two moments; mixtures use the law of total variance.
  std::pair<Eigen::VectorXd, Eigen::MatrixXd> moments() const;
  // Univariate convenience: (mean, variance).
  std::pair<double, double> moments1d() const;

  bool is_mixture() const { return std::holds_alternative<Mixture>(v_); }
  const Mixture& as_mixture() const { return std::get<Mixture>(v_); }

  template <typename Visitor>
  decltype(auto) visit(Visitor&& vis) const {
    return std::visit(std::forward<Visitor>(vis), v_);
  }

  friend PredictiveDensity mixture(std::vector<double> weights,
                                   std::vector<PredictiveDensity> components);

 private:
  explicit PredictiveDensity(Mixture m) : v_(std::move(m)) {}

  std::variant<Gaussian, StudentT, MvGaussian, Mixture> v_;
};

// Normalised mixture of the given components. Nested mixtures are flattened
// eagerly with product weights, so stacked combinations stay one level deep;
// exact-zero weights are dropped. Errors: length mismatch, negative weight,
// all-zero weight vector, heterogeneous dimensions.
PredictiveDensity mixture(std::vector<double> weights,
                          std::vector<PredictiveDensity> components);

// log(sum_i exp(x[i])), guarded against overflow. Empty input is an error.
double log_sum_exp(std::span<const double> x);

// log(sum_i w[i] * exp(x[i])) for nonnegative weights, skipping w[i] == 0.
double weighted_log_sum_exp(std::span<const double> w,
                            std::span<const double> x);

}  // namespace ldf
