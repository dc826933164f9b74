#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "ldf/panel.hpp"
#include "ldf/rng.hpp"

namespace ldf {

// Regime-switching synthetic study: y_t = mu_t + x_t + sigma_y * eps_t with
// an AR(1) long-run component x_t, observed by K forecasters through noisy
// contemporaneous signals z_{kt} and fixed personal levels eta_k.
struct DgpParams {
  double phi_x = 0.9;
  double sigma_x = 0.3;
  double sigma_y = 0.3;
  std::vector<double> sigma_obs;  // per-forecaster signal noise, >= 0
  std::vector<double> eta;        // per-forecaster level
  int K = 0;
  int T = 0;

  void validate() const;

  // K = 20, T = 2001, phi 0.9, sigmas (0.3, 0.3, 0.1),
  // eta_k = -2 + 0.2105 (k - 1).
  static DgpParams study_defaults(int K = 20, int T = 2001);
};

// Markov-switching level process: a finite set of levels and a
// (possibly time-varying) row-stochastic transition matrix.
struct MarkovLevelSpec {
  std::vector<double> states;
  std::function<Eigen::MatrixXd(int)> transition;  // t -> Q_t

  // Constant Q with the given diagonal; off-diagonal mass split evenly.
  static MarkovLevelSpec constant(std::vector<double> states, double diag);
  // Q switches from diag_before to diag_after at t >= change_at.
  static MarkovLevelSpec two_regime(std::vector<double> states,
                                    double diag_before, double diag_after,
                                    int change_at);
};

struct SimPanel {
  ForecastPanel panel;
  std::vector<double> mu;              // level path
  std::vector<double> x;               // long-run component
  std::vector<std::vector<double>> z;  // [k][t] forecaster signals
  std::uint64_t seed = 0;
};

// The fixed piecewise level schedule of the synthetic study (values in
// {-1, 0, 1}); defined for horizons up to 2001.
std::vector<double> fixed_level_path(int T);

// Seeded simulation of the level chain; initial state uniform over states.
std::vector<double> markov_level_path(const MarkovLevelSpec& spec, int T,
                                      std::uint64_t seed);
std::vector<double> markov_level_path(const MarkovLevelSpec& spec, int T,
                                      Rng& rng);

// Seeded panel draw. Draw order: x path, per-forecaster signal noise,
// realization noise. x_1 starts from the stationary law N(0, sx^2/(1-phi^2)).
// Forecaster k's density for y_t is N(eta_k + z_{kt}, sigma_y^2).
SimPanel simulate_panel(const DgpParams& params,
                        const std::vector<double>& levels, std::uint64_t seed);
SimPanel simulate_panel(const DgpParams& params,
                        const std::vector<double>& levels, Rng& rng);

// One-generator convenience for study runs with Markov levels: draws the
// level path first, then the panel, from the same stream.
SimPanel simulate_markov_study(const DgpParams& params,
                               const MarkovLevelSpec& spec, std::uint64_t seed);

}  // namespace ldf
