#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ldf/panel.hpp"
#include "ldf/parallel.hpp"
#include "ldf/score.hpp"

namespace ldf {

enum class LayerOp { Softmax, Argmax };

// One meta-model layer: an averaging (softmax) or selection (argmax)
// operator together with its grid of discount factors. The grid is kept
// sorted ascending; duplicates are rejected.
struct LayerSpec {
  LayerOp op = LayerOp::Softmax;
  std::vector<double> grid;

  void validate() const;
  std::vector<double> sorted_grid() const;
};

// Discounted-score recursion convention. DiscountAll updates
// L <- alpha * (L + s), so the most recent score carries weight alpha^1 and
// softmax of the accumulated score reproduces the DMA recursion exactly.
// KeepNewest updates L <- alpha * L + s (most recent score weight 1); the
// two differ by a uniform temperature factor alpha and are argmax-identical.
enum class LdplConvention { DiscountAll, KeepNewest };

struct LdfConfig {
  std::vector<LayerSpec> layers;  // final layer grid must be a single alpha
  double c = 1e-20;               // weight floor constant, >= 0
  ScoreFunction score = ScoreFunction::log_score();
  LdplConvention convention = LdplConvention::DiscountAll;
  bool keep_layer_weights = true;

  double final_alpha() const { return layers.back().grid.front(); }

  void validate(int pool_size) const;

  // The discount grid used throughout the studies:
  // {0.001, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99, 1.0}.
  static std::vector<double> default_grid();

  // Convenience builder: ops is a string over {'s','a'}, one per layer.
  // All layers but the last use inner_grid; the last layer gets {final_alpha}.
  // For a single layer, inner_grid is unused.
  static LdfConfig stack(std::string_view ops, std::vector<double> inner_grid,
                         double final_alpha, double c = 1e-20);
};

// Elementary kernels -------------------------------------------------------

// One discounted-score accumulation step under the DiscountAll convention:
// returns alpha * (prev + score).
double ldpl_update(double prev, double score, double alpha);

// softmax with max-subtraction; output on the simplex.
std::vector<double> softmax_weights(std::span<const double> ldpls);

// One-hot at the maximising index; ties break to the lowest index.
std::vector<double> argmax_weights(std::span<const double> ldpls);

// (w_k + c) / sum_l (w_l + c). Applied after every layer operator when c > 0.
std::vector<double> stabilize_weights(std::span<const double> w, double c);

// In-place log-space counterpart of stabilize_weights on unnormalised
// log-weights: exp(out) = exp(in) + c * sum_l exp(in_l), so the subsequent
// softmax yields (w + c)/(1 + Kc). Entries far above the floor are left
// untouched bit for bit. For averaging layers this floor lives in the
// accumulated score state itself, which caps the log-weight gap at -log c
// and is what lets a written-off model recover after a regime change.
void stabilize_log_weights(std::span<double> log_w, double log_c);

// Trace -----------------------------------------------------------------

struct LdfTrace {
  int horizon = 0;
  int pool_size = 0;

  std::vector<PredictiveDensity> combined;          // per t, out-of-sample
  std::vector<std::vector<double>> base_weights;    // per t: effective pool weights
  std::vector<double> scores;                       // realised S(combined_t, y_t)
  std::vector<double> cumulative_scores;            // running sum of scores

  // Per-layer weight tensors w^(n)_{t|t-1,k}(m), row-major over (m, k).
  // Populated when LdfConfig::keep_layer_weights is set.
  std::vector<std::vector<std::vector<double>>> layer_weights;  // [t][n][m*in+k]
  std::vector<int> layer_in_dims;
  std::vector<int> layer_out_dims;

  // Fixed-point iteration metadata (set by ldf_infinity).
  int depth = 0;
  bool converged = true;
  int convergence_depth = 0;
};

// Effective pool weights of the combined density at time t.
const std::vector<double>& flatten_weights(const LdfTrace& trace, int t);

// Engine -------------------------------------------------------------------

// Sequential one-pass run of the layered discounted-score combiner over the
// panel. At each t the layer weights are built from scores of y[0..t-1]
// only, the final layer's combined density for t is emitted, and then y[t]
// is scored. At t = 0 every weight vector is uniform.
LdfTrace ldf_run(const ForecastPanel& panel, const LdfConfig& config,
                 const par::Exec& exec = par::serial());

// Appends copies of layer_template under config's final layer until the
// sup-norm (over the full horizon) of effective pool weights between
// consecutive depths falls below tol, or max_layers is reached (reported via
// trace.converged). Returns the deepest trace; depth counts template layers.
LdfTrace ldf_infinity(const ForecastPanel& panel,
                      const LayerSpec& layer_template, const LdfConfig& config,
                      double tol, int max_layers,
                      const par::Exec& exec = par::serial());

}  // namespace ldf
