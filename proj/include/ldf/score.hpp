#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <utility>

#include "ldf/density.hpp"

namespace ldf {

// Scoring state attached to one scored object (a pool model or a meta-model).
// The combiner calls it exactly once per time step, in time order, with the
// object's emitted density and the realisation. Higher is better.
class ScoreState {
 public:
  virtual ~ScoreState() = default;
  virtual double operator()(const PredictiveDensity& density,
                            const Eigen::VectorXd& y) = 0;
};

// Either the logarithmic score or a user-supplied (possibly stateful) score.
// Stateless scores still go through the state interface; the log score is
// flagged so combiners can take the cheap path over precomputed log
// densities.
class ScoreFunction {
 public:
  using StateFactory = std::function<std::unique_ptr<ScoreState>()>;

  static ScoreFunction log_score() { return ScoreFunction(nullptr); }
  static ScoreFunction custom(StateFactory factory) {
    return ScoreFunction(std::move(factory));
  }

  bool is_log_score() const { return factory_ == nullptr; }

  std::unique_ptr<ScoreState> make_state() const;

 private:
  explicit ScoreFunction(StateFactory factory) : factory_(std::move(factory)) {}

  StateFactory factory_;
};

}  // namespace ldf
