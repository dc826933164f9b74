#include "ldf/evaluation.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace ldf {

namespace {

constexpr double kStdFloor = 1e-12;

double sample_std(const std::deque<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (n - 1.0));
}

}  // namespace

double mls(const std::vector<double>& scores, int s) {
  const int T = static_cast<int>(scores.size());
  if (s < 0 || s >= T) {
    throw std::invalid_argument("mls: need 0 <= s < T");
  }
  double sum = 0.0;
  for (int t = s; t < T; ++t) sum += scores[static_cast<std::size_t>(t)];
  return sum / static_cast<double>(T - s);
}

std::vector<double> lpdr(const std::vector<double>& scores,
                         const std::vector<double>& ref_scores, int s) {
  if (scores.size() != ref_scores.size()) {
    throw std::invalid_argument("lpdr: series length mismatch");
  }
  const int T = static_cast<int>(scores.size());
  if (s < 0 || s >= T) throw std::invalid_argument("lpdr: need 0 <= s < T");
  std::vector<double> out(static_cast<std::size_t>(T - s));
  double acc = 0.0;
  for (int t = s; t < T; ++t) {
    acc += scores[static_cast<std::size_t>(t)] - ref_scores[static_cast<std::size_t>(t)];
    out[static_cast<std::size_t>(t - s)] = acc;
  }
  return out;
}

EvalReport evaluate(const std::vector<double>& scores,
                    const std::vector<double>& ref_scores, int s) {
  EvalReport report;
  report.scores = scores;
  report.calibration = s;
  double sum = 0.0;
  for (std::size_t t = static_cast<std::size_t>(s); t < scores.size(); ++t) {
    sum += scores[t];
  }
  report.sum_log = sum;
  report.mls = sum / static_cast<double>(scores.size() - static_cast<std::size_t>(s));
  report.lpdr = lpdr(scores, ref_scores, s);
  return report;
}

double PortfolioConfig::period_vol() const {
  return target_vol / std::sqrt(static_cast<double>(periods_per_year));
}

PortfolioWeights portfolio_weights(const Eigen::VectorXd& mu,
                                   const Eigen::MatrixXd& sigma,
                                   const PortfolioConfig& config) {
  if (sigma.rows() != mu.size() || sigma.cols() != mu.size()) {
    throw std::invalid_argument("portfolio_weights: shape mismatch");
  }
  if (!(config.target_vol > 0.0) || config.periods_per_year < 1) {
    throw std::invalid_argument("portfolio_weights: invalid config");
  }
  PortfolioWeights out;
  if (mu.isZero(0.0)) {
    out.w = Eigen::VectorXd::Zero(mu.size());
    out.flat = true;
    return out;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("portfolio_weights: sigma not positive definite");
  }
  const Eigen::VectorXd sol = llt.solve(mu);
  const double quad = mu.dot(sol);
  out.w = (config.period_vol() / std::sqrt(quad)) * sol;
  return out;
}

BacktestResult portfolio_backtest(
    const std::vector<PredictiveDensity>& selected_densities,
    const std::vector<Eigen::VectorXd>& realized_returns,
    const PortfolioConfig& config) {
  if (selected_densities.size() != realized_returns.size()) {
    throw std::invalid_argument("portfolio_backtest: series length mismatch");
  }
  if (selected_densities.empty()) {
    throw std::invalid_argument("portfolio_backtest: empty series");
  }
  const std::size_t T = selected_densities.size();
  const auto dim = realized_returns.front().size();

  BacktestResult result;
  result.gross.resize(T);
  result.net.resize(T);
  result.turnover.resize(T);
  result.wealth.resize(T);
  result.weights.resize(T);

  Eigen::VectorXd prev = Eigen::VectorXd::Zero(dim);
  double wealth = 1.0;
  for (std::size_t t = 0; t < T; ++t) {
    if (realized_returns[t].size() != dim) {
      throw std::invalid_argument("portfolio_backtest: return dimension mismatch");
    }
    auto [mu, cov] = selected_densities[t].moments();
    if (mu.size() != dim) {
      throw std::invalid_argument("portfolio_backtest: density dimension mismatch");
    }
    const Eigen::VectorXd w = portfolio_weights(mu, cov, config).w;
    result.weights[t] = w;
    result.gross[t] = w.dot(realized_returns[t]);
    result.turnover[t] = (w - prev).lpNorm<1>();
    result.net[t] = result.gross[t] - config.transaction_cost * result.turnover[t];
    wealth *= 1.0 + result.net[t];
    result.wealth[t] = wealth;
    prev = w;
  }

  auto sharpe = [&](const std::vector<double>& r) {
    double mean = 0.0;
    for (double x : r) mean += x;
    mean /= static_cast<double>(r.size());
    double ss = 0.0;
    for (double x : r) ss += (x - mean) * (x - mean);
    const double sd = r.size() > 1
                          ? std::sqrt(ss / static_cast<double>(r.size() - 1))
                          : 0.0;
    if (sd <= 0.0) {
      result.zero_std = true;
      return std::numeric_limits<double>::quiet_NaN();
    }
    return mean / sd * std::sqrt(static_cast<double>(config.periods_per_year));
  };
  result.sharpe_net = sharpe(result.net);
  result.sharpe_gross = sharpe(result.gross);
  return result;
}

FocusedScoreSeries focused_score(const std::vector<double>& portfolio_returns,
                                 int window) {
  if (window < 2) throw std::invalid_argument("focused_score: window must be >= 2");
  if (portfolio_returns.size() < 2) {
    throw std::invalid_argument("focused_score: need at least two returns");
  }
  FocusedScoreSeries out;
  out.scores.resize(portfolio_returns.size());
  std::deque<double> buf;
  for (std::size_t t = 0; t < portfolio_returns.size(); ++t) {
    buf.push_back(portfolio_returns[t]);
    if (static_cast<int>(buf.size()) > window) buf.pop_front();
    if (buf.size() < 2) {
      // No variability estimate yet; neutral score.
      out.scores[t] = 0.0;
      out.degenerate = true;
      continue;
    }
    double sd = sample_std(buf);
    if (sd < kStdFloor) {
      sd = kStdFloor;
      out.degenerate = true;
    }
    out.scores[t] = portfolio_returns[t] / sd;
  }
  return out;
}

ScoreFunction make_portfolio_focused_score(const PortfolioConfig& config) {
  class FocusedState final : public ScoreState {
   public:
    explicit FocusedState(const PortfolioConfig& config) : config_(config) {}

    double operator()(const PredictiveDensity& density,
                      const Eigen::VectorXd& y) override {
      auto [mu, cov] = density.moments();
      const Eigen::VectorXd w = portfolio_weights(mu, cov, config_).w;
      const double r = w.dot(y);
      buf_.push_back(r);
      if (static_cast<int>(buf_.size()) > config_.sharpe_window) buf_.pop_front();
      if (buf_.size() < 2) return 0.0;
      const double sd = std::max(sample_std(buf_), kStdFloor);
      return r / sd;
    }

   private:
    PortfolioConfig config_;
    std::deque<double> buf_;
  };
  return ScoreFunction::custom(
      [config] { return std::make_unique<FocusedState>(config); });
}

}  // namespace ldf
