#include "ldf/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ldf {

namespace {

void fill_uniform(std::span<double> w) {
  const double u = 1.0 / static_cast<double>(w.size());
  std::fill(w.begin(), w.end(), u);
}

// In-place operator + stabilisation over one LDPL row.
void apply_operator(LayerOp op, std::span<const double> ldpls, double c,
                    std::span<double> out) {
  const std::size_t n = ldpls.size();
  if (op == LayerOp::Softmax) {
    const double m = *std::max_element(ldpls.begin(), ldpls.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = std::exp(ldpls[i] - m);
      sum += out[i];
    }
    for (std::size_t i = 0; i < n; ++i) out[i] /= sum;
  } else {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (ldpls[i] > ldpls[best]) best = i;
    }
    std::fill(out.begin(), out.end(), 0.0);
    out[best] = 1.0;
  }
  if (c > 0.0) {
    const double denom = 1.0 + static_cast<double>(n) * c;
    for (std::size_t i = 0; i < n; ++i) out[i] = (out[i] + c) / denom;
  }
}

}  // namespace

void LayerSpec::validate() const {
  if (grid.empty()) throw std::invalid_argument("LayerSpec: empty grid");
  auto sorted = sorted_grid();
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (!(sorted[i] > 0.0 && sorted[i] <= 1.0)) {
      throw std::invalid_argument("LayerSpec: discount factors must lie in (0, 1]");
    }
    if (i > 0 && sorted[i] == sorted[i - 1]) {
      throw std::invalid_argument("LayerSpec: duplicate discount factor");
    }
  }
}

std::vector<double> LayerSpec::sorted_grid() const {
  std::vector<double> g = grid;
  std::sort(g.begin(), g.end());
  return g;
}

void LdfConfig::validate(int pool_size) const {
  if (layers.empty()) throw std::invalid_argument("LdfConfig: no layers");
  for (const auto& layer : layers) layer.validate();
  if (layers.back().grid.size() != 1) {
    throw std::invalid_argument(
        "LdfConfig: final layer grid must hold a single discount factor");
  }
  if (c < 0.0) throw std::invalid_argument("LdfConfig: c must be >= 0");
  std::size_t max_width = static_cast<std::size_t>(pool_size);
  for (const auto& layer : layers) {
    max_width = std::max(max_width, layer.grid.size());
  }
  if (c > 0.0 && c >= 1.0 / static_cast<double>(max_width)) {
    throw std::invalid_argument("LdfConfig: c must be < 1/K for pool size K");
  }
}

std::vector<double> LdfConfig::default_grid() {
  return {0.001, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99, 1.0};
}

LdfConfig LdfConfig::stack(std::string_view ops, std::vector<double> inner_grid,
                           double final_alpha, double c) {
  if (ops.empty()) throw std::invalid_argument("LdfConfig::stack: no layers");
  LdfConfig config;
  config.c = c;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    LayerOp op;
    switch (ops[i]) {
      case 's': op = LayerOp::Softmax; break;
      case 'a': op = LayerOp::Argmax; break;
      default:
        throw std::invalid_argument("LdfConfig::stack: ops must be 's' or 'a'");
    }
    if (i + 1 == ops.size()) {
      config.layers.push_back({op, {final_alpha}});
    } else {
      config.layers.push_back({op, inner_grid});
    }
  }
  return config;
}

double ldpl_update(double prev, double score, double alpha) {
  if (!std::isfinite(prev) || !std::isfinite(score)) {
    throw std::invalid_argument("ldpl_update: non-finite input");
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("ldpl_update: alpha must lie in (0, 1]");
  }
  return alpha * (prev + score);
}

std::vector<double> softmax_weights(std::span<const double> ldpls) {
  if (ldpls.empty()) throw std::invalid_argument("softmax_weights: empty input");
  std::vector<double> w(ldpls.size());
  apply_operator(LayerOp::Softmax, ldpls, 0.0, w);
  return w;
}

std::vector<double> argmax_weights(std::span<const double> ldpls) {
  if (ldpls.empty()) throw std::invalid_argument("argmax_weights: empty input");
  std::vector<double> w(ldpls.size());
  apply_operator(LayerOp::Argmax, ldpls, 0.0, w);
  return w;
}

std::vector<double> stabilize_weights(std::span<const double> w, double c) {
  if (c < 0.0) throw std::invalid_argument("stabilize_weights: c must be >= 0");
  std::vector<double> out(w.begin(), w.end());
  if (c == 0.0) return out;
  const double denom = 1.0 + static_cast<double>(w.size()) * c;
  for (double& v : out) v = (v + c) / denom;
  return out;
}

void stabilize_log_weights(std::span<double> log_w, double log_c) {
  const double threshold = log_sum_exp({log_w.data(), log_w.size()}) + log_c;
  for (double& v : log_w) {
    const double hi = std::max(v, threshold);
    const double lo = std::min(v, threshold);
    v = hi + std::log1p(std::exp(lo - hi));
  }
}

const std::vector<double>& flatten_weights(const LdfTrace& trace, int t) {
  if (t < 0 || t >= trace.horizon) {
    throw std::out_of_range("flatten_weights: time index out of range");
  }
  return trace.base_weights[static_cast<std::size_t>(t)];
}

namespace {

// Shared state of one engine run. Layer n (0-based here) maps in_dim[n]
// inputs (pool models for n = 0) to out_dim[n] meta-models, one per grid
// element.
struct Engine {
  const ForecastPanel& panel;
  const LdfConfig& config;
  par::Exec exec;

  int K = 0;
  int T = 0;
  int N = 0;
  std::vector<std::vector<double>> grids;  // sorted, per layer
  std::vector<int> in_dim, out_dim;
  std::vector<std::vector<double>> ldpl;     // [n][m*in+k]
  std::vector<std::vector<double>> weights;  // [n][m*in+k]
  std::vector<std::vector<double>> flat;     // [n][m*K+j]
  std::vector<std::vector<double>> obj_scores;  // [n+1][...]: n=0 pool scores
  std::vector<double> base_logp;
  std::vector<std::vector<std::unique_ptr<ScoreState>>> states;  // custom only

  Engine(const ForecastPanel& p, const LdfConfig& cfg, const par::Exec& ex)
      : panel(p), config(cfg), exec(ex) {
    panel.validate();
    K = panel.pool_size();
    T = panel.horizon();
    config.validate(K);
    N = static_cast<int>(config.layers.size());
    grids.resize(N);
    in_dim.resize(N);
    out_dim.resize(N);
    for (int n = 0; n < N; ++n) {
      grids[n] = config.layers[n].sorted_grid();
      in_dim[n] = n == 0 ? K : out_dim[n - 1];
      out_dim[n] = static_cast<int>(grids[n].size());
    }
    ldpl.resize(N);
    weights.resize(N);
    flat.resize(N);
    for (int n = 0; n < N; ++n) {
      ldpl[n].assign(static_cast<std::size_t>(in_dim[n]) * out_dim[n], 0.0);
      weights[n].assign(ldpl[n].size(), 0.0);
      flat[n].assign(static_cast<std::size_t>(out_dim[n]) * K, 0.0);
    }
    obj_scores.resize(N + 1);
    obj_scores[0].assign(K, 0.0);
    for (int n = 0; n < N; ++n) obj_scores[n + 1].assign(out_dim[n], 0.0);
    base_logp.assign(K, 0.0);
    if (!config.score.is_log_score()) {
      states.resize(N + 1);
      states[0].resize(K);
      for (int k = 0; k < K; ++k) states[0][k] = config.score.make_state();
      for (int n = 0; n < N; ++n) {
        states[n + 1].resize(out_dim[n]);
        for (int m = 0; m < out_dim[n]; ++m) {
          states[n + 1][m] = config.score.make_state();
        }
      }
    }
  }

  double discount(double prev, double score, double alpha) const {
    return config.convention == LdplConvention::DiscountAll
               ? alpha * (prev + score)
               : alpha * prev + score;
  }

  // Step A: fold the scores observed at t-1 into every LDPL cell. For
  // averaging layers the c floor is folded into the state as well (the
  // power-then-floor recursion per discount factor); selection layers keep
  // pure discounted sums so the ranking is untouched.
  void update_ldpls() {
    for (int n = 0; n < N; ++n) {
      const auto& grid = grids[n];
      const auto& scores = obj_scores[n];
      auto& L = ldpl[n];
      const int in = in_dim[n];
      const bool floor_state =
          config.c > 0.0 && config.layers[n].op == LayerOp::Softmax;
      const double log_c = config.c > 0.0 ? std::log(config.c) : 0.0;
      par::for_index(static_cast<std::size_t>(out_dim[n]), exec, [&](std::size_t m) {
        const double alpha = grid[m];
        double* row = L.data() + m * in;
        for (int k = 0; k < in; ++k) {
          row[k] = discount(row[k], scores[k], alpha);
        }
        if (floor_state) {
          stabilize_log_weights({row, static_cast<std::size_t>(in)}, log_c);
        }
      });
    }
  }

  // Step B: operator per meta-model (softmax state already carries the
  // floor; argmax output is floored here), then effective pool weights via
  // the layer-by-layer product.
  void build_weights(bool cold_start) {
    for (int n = 0; n < N; ++n) {
      const int in = in_dim[n];
      auto& W = weights[n];
      auto& F = flat[n];
      const double* Fprev = n > 0 ? flat[n - 1].data() : nullptr;
      const LayerOp op = config.layers[n].op;
      const double c = op == LayerOp::Argmax ? config.c : 0.0;
      const auto& L = ldpl[n];
      par::for_index(static_cast<std::size_t>(out_dim[n]), exec, [&](std::size_t m) {
        double* wrow = W.data() + m * in;
        if (cold_start) {
          fill_uniform({wrow, static_cast<std::size_t>(in)});
        } else {
          apply_operator(op, {L.data() + m * in, static_cast<std::size_t>(in)},
                         c, {wrow, static_cast<std::size_t>(in)});
        }
        double* frow = F.data() + m * K;
        if (n == 0) {
          std::copy(wrow, wrow + K, frow);
        } else {
          std::fill(frow, frow + K, 0.0);
          for (int k = 0; k < in; ++k) {
            const double wk = wrow[k];
            const double* prev = Fprev + static_cast<std::size_t>(k) * K;
            for (int j = 0; j < K; ++j) frow[j] += wk * prev[j];
          }
        }
      });
    }
  }

  // Step D: score the pool and every meta-model at the realisation y_t.
  void score_objects(int t) {
    const auto& y = panel.y[static_cast<std::size_t>(t)];
    const auto& row = panel.densities[static_cast<std::size_t>(t)];
    par::for_index(static_cast<std::size_t>(K), exec, [&](std::size_t k) {
      base_logp[k] = row[k].log_density(y);
    });
    if (config.score.is_log_score()) {
      obj_scores[0] = base_logp;
      for (int n = 0; n < N; ++n) {
        auto& out = obj_scores[n + 1];
        const auto& F = flat[n];
        par::for_index(static_cast<std::size_t>(out_dim[n]), exec, [&](std::size_t m) {
          out[m] = weighted_log_sum_exp(
              {F.data() + m * K, static_cast<std::size_t>(K)}, base_logp);
        });
      }
    } else {
      for (int k = 0; k < K; ++k) {
        obj_scores[0][static_cast<std::size_t>(k)] =
            (*states[0][static_cast<std::size_t>(k)])(row[static_cast<std::size_t>(k)], y);
      }
      for (int n = 0; n < N; ++n) {
        for (int m = 0; m < out_dim[n]; ++m) {
          obj_scores[n + 1][static_cast<std::size_t>(m)] =
              (*states[n + 1][static_cast<std::size_t>(m)])(meta_density(n, m, t), y);
        }
      }
    }
    for (const auto& level : obj_scores) {
      for (double s : level) {
        if (!std::isfinite(s)) {
          throw std::runtime_error("ldf_run: non-finite model score");
        }
      }
    }
  }

  PredictiveDensity meta_density(int n, int m, int t) const {
    const auto& F = flat[static_cast<std::size_t>(n)];
    std::vector<double> w(F.begin() + static_cast<std::ptrdiff_t>(m) * K,
                          F.begin() + static_cast<std::ptrdiff_t>(m + 1) * K);
    return mixture(std::move(w), panel.densities[static_cast<std::size_t>(t)]);
  }

  LdfTrace run() {
    LdfTrace trace;
    trace.horizon = T;
    trace.pool_size = K;
    trace.combined.reserve(static_cast<std::size_t>(T));
    trace.base_weights.reserve(static_cast<std::size_t>(T));
    trace.scores.resize(static_cast<std::size_t>(T));
    trace.cumulative_scores.resize(static_cast<std::size_t>(T));
    trace.layer_in_dims.assign(in_dim.begin(), in_dim.end());
    trace.layer_out_dims.assign(out_dim.begin(), out_dim.end());
    if (config.keep_layer_weights) {
      trace.layer_weights.resize(static_cast<std::size_t>(T));
    }

    double cumulative = 0.0;
    for (int t = 0; t < T; ++t) {
      if (t > 0) update_ldpls();
      build_weights(t == 0);

      const auto& final_flat = flat[static_cast<std::size_t>(N - 1)];
      std::vector<double> base(final_flat.begin(), final_flat.begin() + K);
      trace.combined.push_back(
          mixture(base, panel.densities[static_cast<std::size_t>(t)]));
      trace.base_weights.push_back(std::move(base));
      if (config.keep_layer_weights) {
        trace.layer_weights[static_cast<std::size_t>(t)] = weights;
      }

      score_objects(t);
      const double s = obj_scores[static_cast<std::size_t>(N)][0];
      trace.scores[static_cast<std::size_t>(t)] = s;
      cumulative += s;
      trace.cumulative_scores[static_cast<std::size_t>(t)] = cumulative;
    }
    return trace;
  }
};

}  // namespace

LdfTrace ldf_run(const ForecastPanel& panel, const LdfConfig& config,
                 const par::Exec& exec) {
  Engine engine(panel, config, exec);
  return engine.run();
}

LdfTrace ldf_infinity(const ForecastPanel& panel,
                      const LayerSpec& layer_template, const LdfConfig& config,
                      double tol, int max_layers, const par::Exec& exec) {
  if (!(tol > 0.0)) throw std::invalid_argument("ldf_infinity: tol must be > 0");
  if (max_layers < 2) {
    throw std::invalid_argument("ldf_infinity: max_layers must be >= 2");
  }
  layer_template.validate();
  panel.validate();
  const int K = panel.pool_size();
  const int T = panel.horizon();
  const LayerSpec final_layer = config.layers.back();
  config.validate(K);
  if (!config.score.is_log_score()) {
    throw std::invalid_argument(
        "ldf_infinity: fixed-point iteration requires the log score");
  }

  const std::vector<double> grid = layer_template.sorted_grid();
  const int M = static_cast<int>(grid.size());
  const double fin_alpha = final_layer.grid.front();
  const double c = config.c;
  const int D = max_layers;

  // Template layer d (1-based depth) holds LDPL over the layer below; the
  // depth-d probe is the configured final layer reading template layer d.
  // One pass over the horizon updates every depth simultaneously, because a
  // layer's trajectory does not depend on anything stacked above it.
  std::vector<std::vector<double>> ldpl(static_cast<std::size_t>(D));
  std::vector<std::vector<double>> flat(static_cast<std::size_t>(D));
  std::vector<std::vector<double>> meta_scores(static_cast<std::size_t>(D));
  for (int d = 0; d < D; ++d) {
    const int in = d == 0 ? K : M;
    ldpl[static_cast<std::size_t>(d)].assign(static_cast<std::size_t>(M) * in, 0.0);
    flat[static_cast<std::size_t>(d)].assign(static_cast<std::size_t>(M) * K, 0.0);
    meta_scores[static_cast<std::size_t>(d)].assign(static_cast<std::size_t>(M), 0.0);
  }
  std::vector<std::vector<double>> probe_ldpl(
      static_cast<std::size_t>(D), std::vector<double>(static_cast<std::size_t>(M), 0.0));
  std::vector<std::vector<double>> probe_flat(
      static_cast<std::size_t>(D), std::vector<double>(static_cast<std::size_t>(K), 0.0));
  std::vector<double> sup_delta(static_cast<std::size_t>(D - 1), 0.0);
  std::vector<double> base_logp(static_cast<std::size_t>(K), 0.0);
  std::vector<double> pool_scores(static_cast<std::size_t>(K), 0.0);

  auto discount = [&](double prev, double s, double alpha) {
    return config.convention == LdplConvention::DiscountAll ? alpha * (prev + s)
                                                            : alpha * prev + s;
  };
  const bool floor_template = c > 0.0 && layer_template.op == LayerOp::Softmax;
  const bool floor_probe = c > 0.0 && final_layer.op == LayerOp::Softmax;
  const double log_c = c > 0.0 ? std::log(c) : 0.0;

  for (int t = 0; t < T; ++t) {
    if (t > 0) {
      par::for_index(static_cast<std::size_t>(D), exec, [&](std::size_t d) {
        const int in = d == 0 ? K : M;
        const auto& below = d == 0 ? pool_scores : meta_scores[d - 1];
        for (int m = 0; m < M; ++m) {
          double* row = ldpl[d].data() + static_cast<std::size_t>(m) * in;
          for (int k = 0; k < in; ++k) {
            row[k] = discount(row[k], below[static_cast<std::size_t>(k)], grid[static_cast<std::size_t>(m)]);
          }
          if (floor_template) {
            stabilize_log_weights({row, static_cast<std::size_t>(in)}, log_c);
          }
        }
        double* prow = probe_ldpl[d].data();
        for (int m = 0; m < M; ++m) {
          prow[m] = discount(prow[m], meta_scores[d][static_cast<std::size_t>(m)], fin_alpha);
        }
        if (floor_probe) stabilize_log_weights(probe_ldpl[d], log_c);
      });
    }

    // Template weights/flattening depth by depth (sequential in d), then the
    // per-depth probes (parallel across d).
    std::vector<double> wrow(static_cast<std::size_t>(std::max(K, M)));
    for (int d = 0; d < D; ++d) {
      const int in = d == 0 ? K : M;
      for (int m = 0; m < M; ++m) {
        std::span<double> w(wrow.data(), static_cast<std::size_t>(in));
        if (t == 0) {
          fill_uniform(w);
        } else {
          apply_operator(layer_template.op,
                         {ldpl[static_cast<std::size_t>(d)].data() + static_cast<std::size_t>(m) * in,
                          static_cast<std::size_t>(in)},
                         layer_template.op == LayerOp::Argmax ? c : 0.0, w);
        }
        double* frow = flat[static_cast<std::size_t>(d)].data() + static_cast<std::size_t>(m) * K;
        if (d == 0) {
          std::copy(w.begin(), w.end(), frow);
        } else {
          std::fill(frow, frow + K, 0.0);
          for (int k = 0; k < in; ++k) {
            const double* prev =
                flat[static_cast<std::size_t>(d - 1)].data() + static_cast<std::size_t>(k) * K;
            for (int j = 0; j < K; ++j) frow[j] += w[static_cast<std::size_t>(k)] * prev[j];
          }
        }
      }
    }
    par::for_index(static_cast<std::size_t>(D), exec, [&](std::size_t d) {
      std::vector<double> pw(static_cast<std::size_t>(M));
      if (t == 0) {
        fill_uniform(pw);
      } else {
        apply_operator(final_layer.op, probe_ldpl[d],
                       final_layer.op == LayerOp::Argmax ? c : 0.0, pw);
      }
      double* out = probe_flat[d].data();
      std::fill(out, out + K, 0.0);
      for (int m = 0; m < M; ++m) {
        const double* frow = flat[d].data() + static_cast<std::size_t>(m) * K;
        for (int j = 0; j < K; ++j) out[j] += pw[static_cast<std::size_t>(m)] * frow[j];
      }
    });
    par::for_index(static_cast<std::size_t>(D - 1), exec, [&](std::size_t d) {
      double delta = 0.0;
      for (int j = 0; j < K; ++j) {
        delta = std::max(delta, std::abs(probe_flat[d + 1][static_cast<std::size_t>(j)] -
                                         probe_flat[d][static_cast<std::size_t>(j)]));
      }
      sup_delta[d] = std::max(sup_delta[d], delta);
    });

    const auto& y = panel.y[static_cast<std::size_t>(t)];
    const auto& row = panel.densities[static_cast<std::size_t>(t)];
    par::for_index(static_cast<std::size_t>(K), exec, [&](std::size_t k) {
      base_logp[k] = row[k].log_density(y);
    });
    pool_scores = base_logp;
    par::for_index(static_cast<std::size_t>(D), exec, [&](std::size_t d) {
      for (int m = 0; m < M; ++m) {
        meta_scores[d][static_cast<std::size_t>(m)] = weighted_log_sum_exp(
            {flat[d].data() + static_cast<std::size_t>(m) * K, static_cast<std::size_t>(K)},
            base_logp);
      }
    });
  }

  int converged_at = -1;
  for (int d = 0; d < D - 1; ++d) {
    if (sup_delta[static_cast<std::size_t>(d)] < tol) {
      converged_at = d + 1;  // depths are 1-based
      break;
    }
  }

  LdfConfig deep = config;
  deep.keep_layer_weights = false;
  deep.layers.clear();
  const int depth = converged_at > 0 ? converged_at + 1 : max_layers;
  for (int d = 0; d < depth; ++d) deep.layers.push_back(layer_template);
  deep.layers.push_back(final_layer);
  LdfTrace trace = ldf_run(panel, deep, exec);
  trace.depth = depth;
  trace.converged = converged_at > 0;
  trace.convergence_depth = converged_at > 0 ? converged_at : max_layers;
  return trace;
}

std::unique_ptr<ScoreState> ScoreFunction::make_state() const {
  if (factory_) return factory_();

  class LogScoreState final : public ScoreState {
   public:
    double operator()(const PredictiveDensity& density,
                      const Eigen::VectorXd& y) override {
      return density.log_density(y);
    }
  };
  return std::make_unique<LogScoreState>();
}

}  // namespace ldf
