#include "ldf/simulation.hpp"

#include <cmath>
#include <stdexcept>

namespace ldf {

void DgpParams::validate() const {
  if (K < 1 || T < 1) throw std::invalid_argument("DgpParams: K and T must be >= 1");
  if (!(std::abs(phi_x) < 1.0)) {
    throw std::invalid_argument("DgpParams: |phi_x| must be < 1");
  }
  if (!(sigma_x >= 0.0) || !(sigma_y > 0.0)) {
    throw std::invalid_argument("DgpParams: sigma_x >= 0 and sigma_y > 0 required");
  }
  if (sigma_obs.size() != static_cast<std::size_t>(K) ||
      eta.size() != static_cast<std::size_t>(K)) {
    throw std::invalid_argument("DgpParams: sigma_obs/eta length must equal K");
  }
  for (double s : sigma_obs) {
    if (!(s >= 0.0)) throw std::invalid_argument("DgpParams: sigma_obs must be >= 0");
  }
}

DgpParams DgpParams::study_defaults(int K, int T) {
  DgpParams p;
  p.K = K;
  p.T = T;
  p.sigma_obs.assign(static_cast<std::size_t>(K), 0.1);
  p.eta.resize(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    p.eta[static_cast<std::size_t>(k)] = -2.0 + 0.2105 * static_cast<double>(k);
  }
  return p;
}

namespace {

Eigen::MatrixXd uniform_switch_matrix(int n, double diag) {
  if (n == 1) return Eigen::MatrixXd::Ones(1, 1);
  Eigen::MatrixXd Q =
      Eigen::MatrixXd::Constant(n, n, (1.0 - diag) / static_cast<double>(n - 1));
  Q.diagonal().setConstant(diag);
  return Q;
}

}  // namespace

MarkovLevelSpec MarkovLevelSpec::constant(std::vector<double> states,
                                          double diag) {
  Eigen::MatrixXd Q = uniform_switch_matrix(static_cast<int>(states.size()), diag);
  return {std::move(states), [Q](int) { return Q; }};
}

MarkovLevelSpec MarkovLevelSpec::two_regime(std::vector<double> states,
                                            double diag_before,
                                            double diag_after, int change_at) {
  const int n = static_cast<int>(states.size());
  auto make = [n](double diag) { return uniform_switch_matrix(n, diag); };
  const Eigen::MatrixXd before = make(diag_before);
  const Eigen::MatrixXd after = make(diag_after);
  return {std::move(states),
          [before, after, change_at](int t) { return t >= change_at ? after : before; }};
}

std::vector<double> fixed_level_path(int T) {
  if (T < 1) throw std::invalid_argument("fixed_level_path: T must be >= 1");
  if (T > 2001) {
    throw std::invalid_argument("fixed_level_path: schedule defined up to T = 2001");
  }
  // Zero-level intervals are checked first, so the overlap on [1700, 1749]
  // resolves to 0.
  static constexpr std::pair<int, int> kZero[] = {
      {0, 49}, {200, 399}, {800, 849}, {970, 979},
      {1000, 1049}, {1600, 1650}, {1700, 2001}};
  static constexpr std::pair<int, int> kOne[] = {
      {100, 150}, {900, 949}, {960, 969}, {990, 999},
      {1050, 1099}, {1200, 1599}, {1700, 1749}};
  auto in = [](int t, const auto& intervals) {
    for (auto [lo, hi] : intervals) {
      if (t >= lo && t <= hi) return true;
    }
    return false;
  };
  std::vector<double> mu(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    mu[static_cast<std::size_t>(t)] = in(t, kZero) ? 0.0 : (in(t, kOne) ? 1.0 : -1.0);
  }
  return mu;
}

std::vector<double> markov_level_path(const MarkovLevelSpec& spec, int T,
                                      Rng& rng) {
  const int n = static_cast<int>(spec.states.size());
  if (n < 1) throw std::invalid_argument("markov_level_path: no states");
  if (T < 1) throw std::invalid_argument("markov_level_path: T must be >= 1");
  std::vector<double> path(static_cast<std::size_t>(T));
  int state = rng.uniform_int(n);
  path[0] = spec.states[static_cast<std::size_t>(state)];
  for (int t = 1; t < T; ++t) {
    const Eigen::MatrixXd Q = spec.transition(t);
    if (Q.rows() != n || Q.cols() != n) {
      throw std::invalid_argument("markov_level_path: transition shape mismatch");
    }
    for (int i = 0; i < n; ++i) {
      if (std::abs(Q.row(i).sum() - 1.0) > 1e-12 || Q.row(i).minCoeff() < 0.0) {
        throw std::invalid_argument("markov_level_path: rows must be stochastic");
      }
    }
    const double u = rng.uniform();
    double acc = 0.0;
    int next = n - 1;
    for (int j = 0; j < n; ++j) {
      acc += Q(state, j);
      if (u < acc) {
        next = j;
        break;
      }
    }
    state = next;
    path[static_cast<std::size_t>(t)] = spec.states[static_cast<std::size_t>(state)];
  }
  return path;
}

std::vector<double> markov_level_path(const MarkovLevelSpec& spec, int T,
                                      std::uint64_t seed) {
  Rng rng(seed);
  return markov_level_path(spec, T, rng);
}

SimPanel simulate_panel(const DgpParams& params,
                        const std::vector<double>& levels, Rng& rng) {
  params.validate();
  if (levels.size() != static_cast<std::size_t>(params.T)) {
    throw std::invalid_argument("simulate_panel: levels length must equal T");
  }
  const int T = params.T;
  const int K = params.K;

  SimPanel sim;
  sim.mu = levels;
  sim.x.resize(static_cast<std::size_t>(T));
  const double stat_sd =
      params.sigma_x / std::sqrt(1.0 - params.phi_x * params.phi_x);
  sim.x[0] = stat_sd * rng.normal();
  for (int t = 1; t < T; ++t) {
    sim.x[static_cast<std::size_t>(t)] =
        params.phi_x * sim.x[static_cast<std::size_t>(t - 1)] +
        params.sigma_x * rng.normal();
  }

  sim.z.assign(static_cast<std::size_t>(K),
               std::vector<double>(static_cast<std::size_t>(T)));
  for (int k = 0; k < K; ++k) {
    for (int t = 0; t < T; ++t) {
      sim.z[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)] =
          sim.x[static_cast<std::size_t>(t)] +
          params.sigma_obs[static_cast<std::size_t>(k)] * rng.normal();
    }
  }

  const double var_y = params.sigma_y * params.sigma_y;
  sim.panel.densities.resize(static_cast<std::size_t>(T));
  sim.panel.y.resize(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    auto& row = sim.panel.densities[static_cast<std::size_t>(t)];
    row.reserve(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
      row.emplace_back(Gaussian{
          params.eta[static_cast<std::size_t>(k)] +
              sim.z[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)],
          var_y});
    }
    const double y = levels[static_cast<std::size_t>(t)] +
                     sim.x[static_cast<std::size_t>(t)] +
                     params.sigma_y * rng.normal();
    sim.panel.y[static_cast<std::size_t>(t)] = ForecastPanel::scalar(y);
  }
  return sim;
}

SimPanel simulate_panel(const DgpParams& params,
                        const std::vector<double>& levels, std::uint64_t seed) {
  Rng rng(seed);
  SimPanel sim = simulate_panel(params, levels, rng);
  sim.seed = seed;
  return sim;
}

SimPanel simulate_markov_study(const DgpParams& params,
                               const MarkovLevelSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  const std::vector<double> levels = markov_level_path(spec, params.T, rng);
  SimPanel sim = simulate_panel(params, levels, rng);
  sim.seed = seed;
  return sim;
}

}  // namespace ldf
