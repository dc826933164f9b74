#pragma once

#include <vector>

#include "ldf/core.hpp"
#include "ldf/panel.hpp"

namespace ldf {

// Reference combination schemes the layered combiner is measured against.

// Dynamic model averaging: Bayes update of the model probabilities by the
// predictive likelihood, then power-alpha flattening with the small floor c.
// All probability algebra runs in log space; pi_{1|0} is uniform.
LdfTrace dma_run(const ForecastPanel& panel, double alpha, double c,
                 const par::Exec& exec = par::serial());

// alpha = 1, c = 0: standard Bayesian model averaging.
LdfTrace bma_run(const ForecastPanel& panel,
                 const par::Exec& exec = par::serial());

// Equal-weight pool at every t.
LdfTrace simple_average_run(const ForecastPanel& panel,
                            const par::Exec& exec = par::serial());

struct BestNConfig {
  int n = 1;
  int window = 1;
};

// At each t, rank models by mean log score over the last `window` observed
// periods (all available history before the window fills; ties to the lowest
// index) and mix the top n equally.
LdfTrace best_n_run(const ForecastPanel& panel, const BestNConfig& config,
                    const par::Exec& exec = par::serial());

struct EwmaRwConfig {
  double decay = 0.97;
  double initial_variance = 1.0;
};

// Zero-mean random walk with EWMA variance: density for t is N(0, s2_t),
// s2_{t+1} = decay * s2_t + (1 - decay) * r_t^2, s2_1 = initial_variance.
std::vector<PredictiveDensity> ewma_rw_densities(
    const std::vector<double>& returns, const EwmaRwConfig& config);

// Sample variance (n - 1 denominator) of the first `prefix` values; the
// usual way to pick EwmaRwConfig::initial_variance from a calibration run.
double prefix_variance(const std::vector<double>& values, int prefix);

}  // namespace ldf
