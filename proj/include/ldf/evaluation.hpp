#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ldf/density.hpp"
#include "ldf/score.hpp"

namespace ldf {

// Mean score over t = s+1..T (0-based: indices s..T-1) after a calibration
// prefix of length s.
double mls(const std::vector<double>& scores, int s);

// Running sum of (scores - ref_scores) from s+1 on; negative values mean the
// method trails the reference.
std::vector<double> lpdr(const std::vector<double>& scores,
                         const std::vector<double>& ref_scores, int s);

struct EvalReport {
  std::vector<double> scores;
  double mls = 0.0;
  double sum_log = 0.0;           // cumulative score after calibration
  std::vector<double> lpdr;       // vs the reference method
  int calibration = 0;
};

EvalReport evaluate(const std::vector<double>& scores,
                    const std::vector<double>& ref_scores, int s);

struct PortfolioConfig {
  double target_vol = 0.1;          // annualised
  double transaction_cost = 0.0008; // per unit turnover
  int periods_per_year = 12;
  int sharpe_window = 12;

  double period_vol() const;
};

struct PortfolioWeights {
  Eigen::VectorXd w;
  bool flat = false;  // mu = 0: direction undefined, position closed
};

// Maximum expected return subject to the volatility target:
// w = (sigma_p / sqrt(mu' Sigma^-1 mu)) Sigma^-1 mu with
// sigma_p = target_vol / sqrt(periods_per_year). Long-short, no simplex.
PortfolioWeights portfolio_weights(const Eigen::VectorXd& mu,
                                   const Eigen::MatrixXd& sigma,
                                   const PortfolioConfig& config);

struct BacktestResult {
  std::vector<double> gross;             // w' r per period
  std::vector<double> net;               // gross minus turnover cost
  std::vector<double> turnover;          // sum |w_t - w_{t-1}|
  std::vector<double> wealth;            // multiplicative, net, starts at 1
  std::vector<Eigen::VectorXd> weights;
  double sharpe_net = 0.0;
  double sharpe_gross = 0.0;
  bool zero_std = false;                 // Sharpe undefined (flat returns)
};

// Per period: weights from the selected density's moments, gross return
// w' r_t, cost tau * sum|w_t - w_{t-1}| with w_0 = 0. Sharpe ratios are
// annualised by sqrt(periods_per_year).
BacktestResult portfolio_backtest(
    const std::vector<PredictiveDensity>& selected_densities,
    const std::vector<Eigen::VectorXd>& realized_returns,
    const PortfolioConfig& config);

struct FocusedScoreSeries {
  std::vector<double> scores;
  bool degenerate = false;  // the rolling std hit the floor somewhere
};

// score_t = r_t / std(r over the trailing window ending at t), sample
// (n-1) denominator; shorter history is used before the window fills (at
// least two points; the very first score is 0 and flagged). The std is
// floored at 1e-12.
FocusedScoreSeries focused_score(const std::vector<double>& portfolio_returns,
                                 int window);

// Sharpe-targeting score for the combiner: each scored object tracks its own
// portfolio return series (weights from the density's moments, gross
// returns) and is scored by return over trailing rolling std.
ScoreFunction make_portfolio_focused_score(const PortfolioConfig& config);

}  // namespace ldf
