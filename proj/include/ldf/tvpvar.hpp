#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ldf/panel.hpp"
#include "ldf/parallel.hpp"

namespace ldf {

// State-space VAR with forgetting: y_t = X_t beta_t + eps_t,
// beta_{t+1} = beta_t + u_t. The state innovation covariance is carried
// implicitly by inflating beta_cov by 1/lambda each step; the measurement
// covariance follows an EWMA with decay kappa.
struct TvpVarSpec {
  int m = 1;     // endogenous variables
  int p = 1;     // lags
  int n_x = 0;   // asset-specific exogenous variables (per equation)
  int n_xx = 0;  // shared exogenous variables
  // Shrinkage: gamma[0] intercept, gamma[1] own-lag, gamma[2] cross-lag,
  // gamma[3..] one entry per exogenous variable (asset-specific first).
  // A zero entry excludes the coefficient (pinned at exactly zero).
  std::vector<double> gamma;
  double lambda = 1.0;  // coefficient forgetting, (0, 1]
  double kappa = 0.97;  // EWMA covariance decay, (0, 1)

  int per_eq_dim() const { return 1 + p * m + n_x + n_xx; }
  int coeff_dim() const { return m * per_eq_dim(); }

  void validate() const;
};

// Diagonal of the shrinkage prior covariance Omega_0 (length coeff_dim).
// Intercepts get gamma1; lag-l own coefficients gamma2 / l^2; lag-l cross
// coefficients gamma3 / l^2; exogenous variable j gets gamma_{3+j}.
Eigen::VectorXd minnesota_prior(const TvpVarSpec& spec);

struct TvpVarState {
  Eigen::VectorXd beta_mean;
  Eigen::MatrixXd beta_cov;
  Eigen::MatrixXd sigma;  // EWMA measurement covariance estimate
  int t = 0;
};

TvpVarState tvpvar_init(const TvpVarSpec& spec, const Eigen::MatrixXd& sigma0);

// One predict/update cycle: inflate beta_cov by 1/lambda, emit the
// predictive N(X beta, X P X' + Sigma), condition on y, then EWMA-update
// Sigma with the posterior residual. Excluded coefficients stay exactly zero.
PredictiveDensity tvpvar_step(const TvpVarSpec& spec, TvpVarState& state,
                              const Eigen::MatrixXd& X,
                              const Eigen::VectorXd& y);

// Regression design for one equation system observation: block-diagonal
// m x k matrix where row i holds [1, lags..., own exog, shared exog] in
// equation i's coefficient block.
Eigen::MatrixXd var_design_row(const TvpVarSpec& spec,
                               const std::vector<Eigen::VectorXd>& endo_lags,
                               const Eigen::MatrixXd& exog_asset,
                               const Eigen::VectorXd& exog_common);

// Hyperparameter grids considered when spanning a model universe. alpha is
// the combination-layer discount: it is listed for bookkeeping but does not
// enter the filter specs.
struct UniverseGrids {
  std::vector<double> gamma1;
  std::vector<double> gamma2;
  std::vector<double> gamma3;
  std::vector<std::vector<double>> gamma_exog;  // one grid per exogenous variable
  std::vector<double> lambda;
  std::vector<double> kappa;
  std::vector<int> p;
  std::vector<double> alpha;  // bookkeeping only

  void validate() const;
};

// Cartesian product of the grids in documented order (gamma1 outermost, then
// gamma2, gamma3, each exogenous grid, lambda, kappa, p innermost).
std::vector<TvpVarSpec> enumerate_universe(const UniverseGrids& grids, int m,
                                           int n_x, int n_xx);

// The three canonical universes: 64 models (single exogenous variable,
// in-or-out, constant coefficients), 32 models (the same with the exogenous
// variable always included), and 2048 models (four exogenous variables, all
// subsets, lambda over {0.5, 0.7, 0.9, 1}).
UniverseGrids restricted_universe();
UniverseGrids small_fx_universe();
UniverseGrids large_fx_universe();

// Multivariate data fed to the VAR universe.
struct VarData {
  Eigen::MatrixXd endo;                       // T x m
  std::vector<Eigen::MatrixXd> exog_asset;    // n_x matrices, each T x m
  Eigen::MatrixXd exog_common;                // T x n_xx

  int T() const { return static_cast<int>(endo.rows()); }
  void validate(int m, int n_x, int n_xx) const;
};

struct UniverseForecastOptions {
  int calibration = 24;      // prefix for Sigma_0 and standardisation
  bool standardize = true;   // mean/std from the calibration prefix
};

// Runs one filter per spec over the data (embarrassingly parallel across
// specs) and assembles the panel of one-step-ahead predictive densities for
// t = start..T-1, where start = max lag requirement over the universe.
// Densities and realisations are returned on the original data scale.
ForecastPanel universe_forecasts(const VarData& data,
                                 const std::vector<TvpVarSpec>& specs,
                                 const UniverseForecastOptions& options,
                                 const par::Exec& exec = par::serial());

}  // namespace ldf
