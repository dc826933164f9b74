#include "ldf/combiners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ldf {

namespace {

// Shared trace assembly for combiners that produce pool weights directly.
// next_weights(t) must return the weights used for time t (built from
// information up to t - 1 only); the driver records, scores, then advances.
template <typename WeightsFn, typename ObserveFn>
LdfTrace run_pool_combiner(const ForecastPanel& panel, WeightsFn next_weights,
                           ObserveFn observe, const par::Exec& exec) {
  panel.validate();
  const int T = panel.horizon();
  const int K = panel.pool_size();

  LdfTrace trace;
  trace.horizon = T;
  trace.pool_size = K;
  trace.layer_in_dims = {K};
  trace.layer_out_dims = {1};
  trace.combined.reserve(static_cast<std::size_t>(T));
  trace.base_weights.reserve(static_cast<std::size_t>(T));
  trace.scores.resize(static_cast<std::size_t>(T));
  trace.cumulative_scores.resize(static_cast<std::size_t>(T));
  trace.layer_weights.resize(static_cast<std::size_t>(T));

  std::vector<double> logp(static_cast<std::size_t>(K));
  double cumulative = 0.0;
  for (int t = 0; t < T; ++t) {
    std::vector<double> w = next_weights(t);
    trace.combined.push_back(mixture(w, panel.densities[static_cast<std::size_t>(t)]));
    trace.layer_weights[static_cast<std::size_t>(t)] = {w};
    trace.base_weights.push_back(std::move(w));

    const auto& y = panel.y[static_cast<std::size_t>(t)];
    const auto& row = panel.densities[static_cast<std::size_t>(t)];
    par::for_index(static_cast<std::size_t>(K), exec, [&](std::size_t k) {
      logp[k] = row[k].log_density(y);
    });
    const double s =
        weighted_log_sum_exp(trace.base_weights[static_cast<std::size_t>(t)], logp);
    trace.scores[static_cast<std::size_t>(t)] = s;
    cumulative += s;
    trace.cumulative_scores[static_cast<std::size_t>(t)] = cumulative;

    observe(t, logp);
  }
  return trace;
}

}  // namespace

LdfTrace dma_run(const ForecastPanel& panel, double alpha, double c,
                 const par::Exec& exec) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("dma_run: alpha must lie in (0, 1]");
  }
  if (c < 0.0) throw std::invalid_argument("dma_run: c must be >= 0");
  const int K = panel.pool_size();

  // Bayes update, power-alpha flattening, then the c floor, in log space.
  // Normalisation constants are carried implicitly (they cancel under the
  // emission softmax), which keeps dominant weights free of per-step
  // rounding. The floor feeds back into the state, as in the original
  // recursion: it caps the accumulated log-weight gap at -log c, which is
  // what lets a written-off model recover quickly after a regime change.
  std::vector<double> log_pi(static_cast<std::size_t>(K), 0.0);
  const double log_c = c > 0.0 ? std::log(c) : 0.0;

  auto weights_for = [&](int) { return softmax_weights(log_pi); };
  auto observe = [&](int, const std::vector<double>& logp) {
    for (double lp : logp) {
      if (!std::isfinite(lp)) {
        throw std::runtime_error("dma_run: non-finite predictive log-likelihood");
      }
    }
    for (std::size_t k = 0; k < log_pi.size(); ++k) {
      log_pi[k] = alpha * (log_pi[k] + logp[k]);
    }
    if (c > 0.0) stabilize_log_weights(log_pi, log_c);
  };
  return run_pool_combiner(panel, weights_for, observe, exec);
}

LdfTrace bma_run(const ForecastPanel& panel, const par::Exec& exec) {
  return dma_run(panel, 1.0, 0.0, exec);
}

LdfTrace simple_average_run(const ForecastPanel& panel, const par::Exec& exec) {
  const int K = panel.pool_size();
  auto weights_for = [&](int) {
    return std::vector<double>(static_cast<std::size_t>(K),
                               1.0 / static_cast<double>(K));
  };
  return run_pool_combiner(panel, weights_for, [](int, const std::vector<double>&) {},
                           exec);
}

LdfTrace best_n_run(const ForecastPanel& panel, const BestNConfig& config,
                    const par::Exec& exec) {
  if (config.n < 1) throw std::invalid_argument("best_n_run: n must be >= 1");
  if (config.window < 1) {
    throw std::invalid_argument("best_n_run: window must be >= 1");
  }
  const int K = panel.pool_size();
  if (config.n > K) {
    throw std::invalid_argument("best_n_run: n exceeds the pool size");
  }

  std::vector<std::vector<double>> history;  // per past t, K log scores
  auto weights_for = [&](int) {
    const int have = static_cast<int>(history.size());
    const int use = std::min(have, config.window);
    std::vector<double> mean(static_cast<std::size_t>(K), 0.0);
    for (int j = have - use; j < have; ++j) {
      for (int k = 0; k < K; ++k) {
        mean[static_cast<std::size_t>(k)] += history[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
      }
    }
    if (use > 0) {
      for (double& v : mean) v /= static_cast<double>(use);
    }
    std::vector<int> order(static_cast<std::size_t>(K));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return mean[static_cast<std::size_t>(a)] > mean[static_cast<std::size_t>(b)];
    });
    std::vector<double> w(static_cast<std::size_t>(K), 0.0);
    for (int i = 0; i < config.n; ++i) {
      w[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] =
          1.0 / static_cast<double>(config.n);
    }
    return w;
  };
  auto observe = [&](int, const std::vector<double>& logp) {
    history.push_back(logp);
  };
  return run_pool_combiner(panel, weights_for, observe, exec);
}

std::vector<PredictiveDensity> ewma_rw_densities(
    const std::vector<double>& returns, const EwmaRwConfig& config) {
  if (!(config.decay > 0.0 && config.decay < 1.0)) {
    throw std::invalid_argument("ewma_rw_densities: decay must lie in (0, 1)");
  }
  if (!(config.initial_variance > 0.0)) {
    throw std::invalid_argument("ewma_rw_densities: initial variance must be > 0");
  }
  std::vector<PredictiveDensity> out;
  out.reserve(returns.size());
  double s2 = config.initial_variance;
  for (double r : returns) {
    out.push_back(Gaussian{0.0, s2});
    s2 = config.decay * s2 + (1.0 - config.decay) * r * r;
  }
  return out;
}

double prefix_variance(const std::vector<double>& values, int prefix) {
  if (prefix < 2 || prefix > static_cast<int>(values.size())) {
    throw std::invalid_argument("prefix_variance: need 2 <= prefix <= size");
  }
  double mean = 0.0;
  for (int i = 0; i < prefix; ++i) mean += values[static_cast<std::size_t>(i)];
  mean /= static_cast<double>(prefix);
  double ss = 0.0;
  for (int i = 0; i < prefix; ++i) {
    const double d = values[static_cast<std::size_t>(i)] - mean;
    ss += d * d;
  }
  return ss / static_cast<double>(prefix - 1);
}

}  // namespace ldf
