#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "ldf/density.hpp"

namespace ldf {

// T x K grid of one-step-ahead predictive densities plus realised outcomes.
// densities[t][k] forecasts y[t] and was issued at t-1.
struct ForecastPanel {
  std::vector<std::vector<PredictiveDensity>> densities;  // [t][k]
  std::vector<Eigen::VectorXd> y;                         // [t]

  int horizon() const { return static_cast<int>(y.size()); }
  int pool_size() const {
    return densities.empty() ? 0 : static_cast<int>(densities.front().size());
  }

  void validate() const {
    if (densities.size() != y.size()) {
      throw std::invalid_argument("ForecastPanel: densities/realizations size mismatch");
    }
    if (y.empty()) throw std::invalid_argument("ForecastPanel: empty");
    const std::size_t K = densities.front().size();
    if (K == 0) throw std::invalid_argument("ForecastPanel: empty model pool");
    for (std::size_t t = 0; t < densities.size(); ++t) {
      if (densities[t].size() != K) {
        throw std::invalid_argument("ForecastPanel: ragged density grid");
      }
      for (const auto& d : densities[t]) {
        if (d.dimension() != y[t].size()) {
          throw std::invalid_argument("ForecastPanel: density/realization dimension mismatch");
        }
      }
    }
  }

  static Eigen::VectorXd scalar(double v) {
    return Eigen::VectorXd::Constant(1, v);
  }
};

}  // namespace ldf
