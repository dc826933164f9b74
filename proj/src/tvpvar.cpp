#include "ldf/tvpvar.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ldf {

void TvpVarSpec::validate() const {
  if (m < 1 || p < 1) throw std::invalid_argument("TvpVarSpec: m, p must be >= 1");
  if (n_x < 0 || n_xx < 0) {
    throw std::invalid_argument("TvpVarSpec: exogenous counts must be >= 0");
  }
  if (gamma.size() != static_cast<std::size_t>(3 + n_x + n_xx)) {
    throw std::invalid_argument("TvpVarSpec: gamma must have 3 + n_x + n_xx entries");
  }
  for (double g : gamma) {
    if (!(g >= 0.0)) throw std::invalid_argument("TvpVarSpec: gamma must be >= 0");
  }
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("TvpVarSpec: lambda must lie in (0, 1]");
  }
  if (!(kappa > 0.0 && kappa < 1.0)) {
    throw std::invalid_argument("TvpVarSpec: kappa must lie in (0, 1)");
  }
}

Eigen::VectorXd minnesota_prior(const TvpVarSpec& spec) {
  spec.validate();
  Eigen::VectorXd diag(spec.coeff_dim());
  int idx = 0;
  for (int eq = 0; eq < spec.m; ++eq) {
    diag[idx++] = spec.gamma[0];  // intercept
    for (int lag = 1; lag <= spec.p; ++lag) {
      const double damp = static_cast<double>(lag) * static_cast<double>(lag);
      for (int var = 0; var < spec.m; ++var) {
        diag[idx++] = (var == eq ? spec.gamma[1] : spec.gamma[2]) / damp;
      }
    }
    for (int j = 0; j < spec.n_x + spec.n_xx; ++j) {
      diag[idx++] = spec.gamma[static_cast<std::size_t>(3 + j)];
    }
  }
  return diag;
}

TvpVarState tvpvar_init(const TvpVarSpec& spec, const Eigen::MatrixXd& sigma0) {
  if (sigma0.rows() != spec.m || sigma0.cols() != spec.m) {
    throw std::invalid_argument("tvpvar_init: sigma0 shape mismatch");
  }
  TvpVarState state;
  state.beta_mean = Eigen::VectorXd::Zero(spec.coeff_dim());
  state.beta_cov = minnesota_prior(spec).asDiagonal();
  state.sigma = sigma0;
  state.t = 0;
  return state;
}

PredictiveDensity tvpvar_step(const TvpVarSpec& spec, TvpVarState& state,
                              const Eigen::MatrixXd& X,
                              const Eigen::VectorXd& y) {
  const int k = spec.coeff_dim();
  if (X.rows() != spec.m || X.cols() != k) {
    throw std::invalid_argument("tvpvar_step: design shape mismatch");
  }
  if (y.size() != spec.m) {
    throw std::invalid_argument("tvpvar_step: observation shape mismatch");
  }

  // Predict: forgetting replaces an explicit state innovation covariance.
  state.beta_cov /= spec.lambda;

  const Eigen::MatrixXd PXt = state.beta_cov * X.transpose();
  Eigen::MatrixXd S = X * PXt + state.sigma;
  S = 0.5 * (S + S.transpose().eval());
  const Eigen::VectorXd mean = X * state.beta_mean;
  PredictiveDensity predictive{MvGaussian(mean, S)};

  // Update: Gaussian conjugate step. Rows of beta_cov for excluded
  // coefficients are exactly zero, so their gain (and mean) stays zero.
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success) {
    const double jitter = 1e-10 * S.trace() / static_cast<double>(spec.m);
    S.diagonal().array() += jitter;
    llt.compute(S);
    if (llt.info() != Eigen::Success) {
      throw std::runtime_error("tvpvar_step: predictive covariance not PD");
    }
  }
  const Eigen::MatrixXd gain = llt.solve(PXt.transpose()).transpose();  // k x m
  state.beta_mean += gain * (y - mean);
  state.beta_cov -= gain * PXt.transpose();
  state.beta_cov = 0.5 * (state.beta_cov + state.beta_cov.transpose().eval());

  const Eigen::VectorXd resid = y - X * state.beta_mean;
  state.sigma = spec.kappa * state.sigma +
                (1.0 - spec.kappa) * resid * resid.transpose();
  state.t += 1;
  return predictive;
}

Eigen::MatrixXd var_design_row(const TvpVarSpec& spec,
                               const std::vector<Eigen::VectorXd>& endo_lags,
                               const Eigen::MatrixXd& exog_asset,
                               const Eigen::VectorXd& exog_common) {
  if (endo_lags.size() != static_cast<std::size_t>(spec.p)) {
    throw std::invalid_argument("var_design_row: need p lag vectors");
  }
  if (exog_asset.rows() != spec.n_x || exog_asset.cols() != spec.m) {
    throw std::invalid_argument("var_design_row: asset exog shape mismatch");
  }
  if (exog_common.size() != spec.n_xx) {
    throw std::invalid_argument("var_design_row: common exog shape mismatch");
  }
  const int d = spec.per_eq_dim();
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(spec.m, spec.coeff_dim());
  for (int eq = 0; eq < spec.m; ++eq) {
    int col = eq * d;
    X(eq, col++) = 1.0;
    for (int lag = 0; lag < spec.p; ++lag) {
      for (int var = 0; var < spec.m; ++var) {
        X(eq, col++) = endo_lags[static_cast<std::size_t>(lag)][var];
      }
    }
    for (int j = 0; j < spec.n_x; ++j) X(eq, col++) = exog_asset(j, eq);
    for (int j = 0; j < spec.n_xx; ++j) X(eq, col++) = exog_common[j];
  }
  return X;
}

void UniverseGrids::validate() const {
  auto check = [](bool ok) {
    if (!ok) throw std::invalid_argument("UniverseGrids: empty grid");
  };
  check(!gamma1.empty());
  check(!gamma2.empty());
  check(!gamma3.empty());
  for (const auto& g : gamma_exog) check(!g.empty());
  check(!lambda.empty());
  check(!kappa.empty());
  check(!p.empty());
  check(!alpha.empty());
}

std::vector<TvpVarSpec> enumerate_universe(const UniverseGrids& grids, int m,
                                           int n_x, int n_xx) {
  grids.validate();
  if (static_cast<int>(grids.gamma_exog.size()) != n_x + n_xx) {
    throw std::invalid_argument(
        "enumerate_universe: need one exogenous grid per exogenous variable");
  }
  std::vector<TvpVarSpec> out;
  std::vector<std::size_t> exog_idx(grids.gamma_exog.size(), 0);

  auto emit = [&](double g1, double g2, double g3) {
    for (double lam : grids.lambda) {
      for (double kap : grids.kappa) {
        for (int lags : grids.p) {
          TvpVarSpec spec;
          spec.m = m;
          spec.p = lags;
          spec.n_x = n_x;
          spec.n_xx = n_xx;
          spec.lambda = lam;
          spec.kappa = kap;
          spec.gamma = {g1, g2, g3};
          for (std::size_t j = 0; j < exog_idx.size(); ++j) {
            spec.gamma.push_back(grids.gamma_exog[j][exog_idx[j]]);
          }
          spec.validate();
          out.push_back(std::move(spec));
        }
      }
    }
  };

  // Odometer over the per-variable exogenous grids, leftmost slowest.
  auto for_each_exog = [&](auto&& body) {
    std::fill(exog_idx.begin(), exog_idx.end(), 0);
    while (true) {
      body();
      int j = static_cast<int>(exog_idx.size()) - 1;
      while (j >= 0) {
        if (++exog_idx[static_cast<std::size_t>(j)] <
            grids.gamma_exog[static_cast<std::size_t>(j)].size()) {
          break;
        }
        exog_idx[static_cast<std::size_t>(j)] = 0;
        --j;
      }
      if (j < 0) break;
      if (exog_idx.empty()) break;
    }
  };

  for (double g1 : grids.gamma1) {
    for (double g2 : grids.gamma2) {
      for (double g3 : grids.gamma3) {
        if (grids.gamma_exog.empty()) {
          emit(g1, g2, g3);
        } else {
          for_each_exog([&] { emit(g1, g2, g3); });
        }
      }
    }
  }
  return out;
}

UniverseGrids restricted_universe() {
  UniverseGrids g;
  g.gamma1 = {0.0, 10.0};
  g.gamma2 = {0.0, 0.1, 0.5, 0.9};
  g.gamma3 = {0.0, 0.1, 0.5, 0.9};
  g.gamma_exog = {{0.0, 1.0}};
  g.lambda = {1.0};
  g.kappa = {0.97};
  g.p = {6};
  g.alpha = {1.0};
  return g;
}

UniverseGrids small_fx_universe() {
  UniverseGrids g = restricted_universe();
  g.gamma_exog = {{1.0}};  // the single fundamental is always included
  return g;
}

UniverseGrids large_fx_universe() {
  UniverseGrids g = restricted_universe();
  g.gamma_exog = {{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}};
  g.lambda = {0.5, 0.7, 0.9, 1.0};
  return g;
}

void VarData::validate(int m, int n_x, int n_xx) const {
  if (endo.cols() != m) throw std::invalid_argument("VarData: endo width mismatch");
  if (static_cast<int>(exog_asset.size()) != n_x) {
    throw std::invalid_argument("VarData: asset exog count mismatch");
  }
  for (const auto& e : exog_asset) {
    if (e.rows() != endo.rows() || e.cols() != m) {
      throw std::invalid_argument("VarData: asset exog shape mismatch");
    }
  }
  if (exog_common.cols() != n_xx ||
      (n_xx > 0 && exog_common.rows() != endo.rows())) {
    throw std::invalid_argument("VarData: common exog shape mismatch");
  }
}

ForecastPanel universe_forecasts(const VarData& data,
                                 const std::vector<TvpVarSpec>& specs,
                                 const UniverseForecastOptions& options,
                                 const par::Exec& exec) {
  if (specs.empty()) throw std::invalid_argument("universe_forecasts: no specs");
  const int m = specs.front().m;
  const int n_x = specs.front().n_x;
  const int n_xx = specs.front().n_xx;
  for (const auto& s : specs) {
    if (s.m != m || s.n_x != n_x || s.n_xx != n_xx) {
      throw std::invalid_argument("universe_forecasts: mixed data dimensions");
    }
  }
  data.validate(m, n_x, n_xx);
  const int T = data.T();
  int max_p = 1;
  for (const auto& s : specs) max_p = std::max(max_p, s.p);
  const int start = max_p;  // need p endogenous lags and one exogenous lag
  if (options.calibration < m + 2 || options.calibration > T - start - 1) {
    throw std::invalid_argument("universe_forecasts: calibration prefix out of range");
  }

  // Standardise on the calibration prefix so the shrinkage grids are on a
  // common scale; densities are mapped back to data units on output.
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(m);
  Eigen::MatrixXd endo = data.endo;
  std::vector<Eigen::MatrixXd> exog_asset = data.exog_asset;
  Eigen::MatrixXd exog_common = data.exog_common;
  auto standardize_matrix = [&](Eigen::MatrixXd& x) {
    for (int j = 0; j < x.cols(); ++j) {
      const auto head = x.col(j).head(options.calibration);
      const double mu = head.mean();
      double sd = std::sqrt((head.array() - mu).square().sum() /
                            static_cast<double>(options.calibration - 1));
      if (sd <= 0.0) sd = 1.0;
      x.col(j) = (x.col(j).array() - mu) / sd;
    }
  };
  if (options.standardize) {
    for (int j = 0; j < m; ++j) {
      const auto head = endo.col(j).head(options.calibration);
      mean[j] = head.mean();
      double sd = std::sqrt((head.array() - mean[j]).square().sum() /
                            static_cast<double>(options.calibration - 1));
      if (sd <= 0.0) sd = 1.0;
      scale[j] = sd;
      endo.col(j) = (endo.col(j).array() - mean[j]) / sd;
    }
    for (auto& e : exog_asset) standardize_matrix(e);
    if (n_xx > 0) standardize_matrix(exog_common);
  }

  Eigen::MatrixXd sigma0 = Eigen::MatrixXd::Zero(m, m);
  {
    const auto head = endo.topRows(options.calibration);
    const Eigen::RowVectorXd mu = head.colwise().mean();
    const Eigen::MatrixXd centered = head.rowwise() - mu;
    sigma0 = centered.transpose() * centered /
             static_cast<double>(options.calibration - 1);
  }

  const int H = T - start;
  const std::size_t n_specs = specs.size();
  std::vector<std::vector<PredictiveDensity>> by_spec(
      n_specs, std::vector<PredictiveDensity>(static_cast<std::size_t>(H)));

  par::for_index(n_specs, exec, [&](std::size_t s) {
    const TvpVarSpec& spec = specs[s];
    TvpVarState state = tvpvar_init(spec, sigma0);
    std::vector<Eigen::VectorXd> lags(static_cast<std::size_t>(spec.p));
    Eigen::MatrixXd xa(spec.n_x, m);
    Eigen::VectorXd xc(spec.n_xx);
    for (int t = start; t < T; ++t) {
      for (int lag = 0; lag < spec.p; ++lag) {
        lags[static_cast<std::size_t>(lag)] = endo.row(t - 1 - lag).transpose();
      }
      for (int j = 0; j < spec.n_x; ++j) {
        xa.row(j) = exog_asset[static_cast<std::size_t>(j)].row(t - 1);
      }
      for (int j = 0; j < spec.n_xx; ++j) xc[j] = exog_common(t - 1, j);
      const Eigen::MatrixXd X = var_design_row(spec, lags, xa, xc);
      PredictiveDensity pred =
          tvpvar_step(spec, state, X, endo.row(t).transpose());
      if (options.standardize) {
        auto [mu, cov] = pred.moments();
        const Eigen::VectorXd mu_raw = (mu.array() * scale.array()).matrix() + mean;
        const Eigen::MatrixXd cov_raw =
            scale.asDiagonal() * cov * scale.asDiagonal();
        pred = PredictiveDensity(MvGaussian(mu_raw, cov_raw));
      }
      by_spec[s][static_cast<std::size_t>(t - start)] = std::move(pred);
    }
  });

  ForecastPanel panel;
  panel.densities.resize(static_cast<std::size_t>(H));
  panel.y.resize(static_cast<std::size_t>(H));
  for (int t = 0; t < H; ++t) {
    auto& row = panel.densities[static_cast<std::size_t>(t)];
    row.reserve(n_specs);
    for (std::size_t s = 0; s < n_specs; ++s) {
      row.push_back(std::move(by_spec[s][static_cast<std::size_t>(t)]));
    }
    panel.y[static_cast<std::size_t>(t)] =
        data.endo.row(start + t).transpose();
  }
  return panel;
}

}  // namespace ldf
