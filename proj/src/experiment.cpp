#include "ldf/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ldf/combiners.hpp"
#include "ldf/core.hpp"
#include "ldf/csv.hpp"
#include "ldf/evaluation.hpp"
#include "ldf/simulation.hpp"
#include "ldf/tvpvar.hpp"

namespace ldf {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& context) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) {
      throw std::invalid_argument("config: unknown key '" + key + "' in " + context);
    }
  }
}

// Removes everything this run wrote if it does not finish.
class OutputGuard {
 public:
  ~OutputGuard() {
    if (armed_) {
      for (const auto& f : files_) {
        std::error_code ec;
        fs::remove(f, ec);
      }
    }
  }
  std::ofstream open(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    files_.push_back(path);
    return out;
  }
  void track(const std::string& path) { files_.push_back(path); }
  void disarm() { armed_ = false; }
  const std::vector<std::string>& files() const { return files_; }

 private:
  std::vector<std::string> files_;
  bool armed_ = true;
};

struct MethodSpec {
  std::string name;
  std::string type;
  double alpha = 0.95;
  double c = 1e-20;
  std::string operators;       // ldf
  std::vector<double> grid;    // ldf / ldf_infinity
  double final_alpha = 0.95;   // ldf / ldf_infinity
  double tol = 1e-8;           // ldf_infinity
  int max_layers = 200;        // ldf_infinity
  int n = 1;                   // best_n
  int window = 1;              // best_n
  double decay = 0.97;         // ewma_rw
  double initial_variance = 0.0;
  int calibrate_prefix = 0;    // ewma_rw: derive initial variance from prefix
};

std::string trimmed_number(double x) { return format_double(x); }

MethodSpec parse_method(const json& j) {
  check_keys(j,
             {"name", "type", "alpha", "c", "operators", "grid", "final_alpha",
              "tol", "max_layers", "n", "window", "decay", "initial_variance",
              "calibrate_prefix"},
             "methods[]");
  MethodSpec m;
  m.type = j.at("type").get<std::string>();
  if (j.contains("alpha")) m.alpha = j.at("alpha").get<double>();
  if (j.contains("c")) m.c = j.at("c").get<double>();
  if (j.contains("operators")) m.operators = j.at("operators").get<std::string>();
  if (j.contains("grid")) m.grid = j.at("grid").get<std::vector<double>>();
  if (j.contains("final_alpha")) m.final_alpha = j.at("final_alpha").get<double>();
  if (j.contains("tol")) m.tol = j.at("tol").get<double>();
  if (j.contains("max_layers")) m.max_layers = j.at("max_layers").get<int>();
  if (j.contains("n")) m.n = j.at("n").get<int>();
  if (j.contains("window")) m.window = j.at("window").get<int>();
  if (j.contains("decay")) m.decay = j.at("decay").get<double>();
  if (j.contains("initial_variance")) {
    m.initial_variance = j.at("initial_variance").get<double>();
  }
  if (j.contains("calibrate_prefix")) {
    m.calibrate_prefix = j.at("calibrate_prefix").get<int>();
  }
  if (m.grid.empty()) m.grid = LdfConfig::default_grid();

  if (j.contains("name")) {
    m.name = j.at("name").get<std::string>();
  } else if (m.type == "dma") {
    m.name = "dma_" + trimmed_number(m.alpha);
  } else if (m.type == "ldf") {
    m.name = "ldf_" + m.operators + "_" + trimmed_number(m.final_alpha);
  } else if (m.type == "ldf_infinity") {
    m.name = "ldf_inf_" + m.operators + "_" + trimmed_number(m.final_alpha);
  } else if (m.type == "best_n") {
    m.name = "best_" + std::to_string(m.n);
  } else {
    m.name = m.type;
  }
  return m;
}

ScoreFunction make_score(const std::string& kind, const PortfolioConfig& pc) {
  if (kind == "log") return ScoreFunction::log_score();
  if (kind == "focused") return make_portfolio_focused_score(pc);
  throw std::invalid_argument("config: score must be 'log' or 'focused'");
}

LdfTrace run_method(const MethodSpec& m, const ForecastPanel& panel,
                    const ScoreFunction& score, const par::Exec& exec) {
  if (m.type == "dma") return dma_run(panel, m.alpha, m.c, exec);
  if (m.type == "bma") return bma_run(panel, exec);
  if (m.type == "simple") return simple_average_run(panel, exec);
  if (m.type == "best_n") return best_n_run(panel, {m.n, m.window}, exec);
  if (m.type == "ldf") {
    LdfConfig config = LdfConfig::stack(m.operators, m.grid, m.final_alpha, m.c);
    config.score = score;
    config.keep_layer_weights = false;
    return ldf_run(panel, config, exec);
  }
  if (m.type == "ldf_infinity") {
    if (m.operators.size() != 1) {
      throw std::invalid_argument(
          "config: ldf_infinity takes a single-character 'operators'");
    }
    LdfConfig config = LdfConfig::stack(m.operators, m.grid, m.final_alpha, m.c);
    LayerSpec tmpl{config.layers.front().op, m.grid};
    return ldf_infinity(panel, tmpl, config, m.tol, m.max_layers, exec);
  }
  if (m.type == "ewma_rw") {
    if (panel.y.front().size() != 1) {
      throw std::invalid_argument("ewma_rw applies to univariate panels only");
    }
    std::vector<double> returns(panel.y.size());
    for (std::size_t t = 0; t < panel.y.size(); ++t) returns[t] = panel.y[t][0];
    EwmaRwConfig cfg{m.decay, m.initial_variance};
    if (m.calibrate_prefix > 0) {
      cfg.initial_variance = prefix_variance(returns, m.calibrate_prefix);
    }
    ForecastPanel rw;
    rw.y = panel.y;
    auto densities = ewma_rw_densities(returns, cfg);
    rw.densities.resize(densities.size());
    for (std::size_t t = 0; t < densities.size(); ++t) {
      rw.densities[t] = {densities[t]};
    }
    return simple_average_run(rw, exec);
  }
  throw std::invalid_argument("config: unknown method type '" + m.type + "'");
}

struct SummaryRow {
  std::string method;
  int calibration = 0;
  double mean_mls = 0.0;
  double sd_mls = 0.0;
  double mean_sum = 0.0;
  double sd_sum = 0.0;
};

std::pair<double, double> mean_sd(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

SummaryRow summarize(const std::string& name, int calibration,
                     const std::vector<std::vector<double>>& per_seed_scores) {
  std::vector<double> mls_values, sums;
  for (const auto& scores : per_seed_scores) {
    mls_values.push_back(mls(scores, calibration));
    double sum = 0.0;
    for (std::size_t t = static_cast<std::size_t>(calibration); t < scores.size(); ++t) {
      sum += scores[t];
    }
    sums.push_back(sum);
  }
  SummaryRow row;
  row.method = name;
  row.calibration = calibration;
  std::tie(row.mean_mls, row.sd_mls) = mean_sd(mls_values);
  std::tie(row.mean_sum, row.sd_sum) = mean_sd(sums);
  return row;
}

std::string summary_text(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  out << "method,calibration,mean_mls,sd_mls,mean_sum_logp,sd_sum_logp\n";
  for (const auto& r : rows) {
    out << r.method << "," << r.calibration << "," << format_double(r.mean_mls)
        << "," << format_double(r.sd_mls) << "," << format_double(r.mean_sum)
        << "," << format_double(r.sd_sum) << "\n";
  }
  return out.str();
}

void write_summary(std::ofstream& out, const std::vector<SummaryRow>& rows) {
  out << summary_text(rows);
}

void write_scores_csv(OutputGuard& guard, const std::string& path,
                      const std::vector<std::uint64_t>& seeds,
                      const std::vector<std::vector<double>>& per_seed_scores) {
  std::ofstream out = guard.open(path);
  out << "t";
  if (seeds.empty()) {
    out << ",score";
  } else {
    for (auto s : seeds) out << ",seed_" << s;
  }
  out << "\n";
  const std::size_t T = per_seed_scores.front().size();
  for (std::size_t t = 0; t < T; ++t) {
    out << t;
    for (const auto& scores : per_seed_scores) {
      out << "," << format_double(scores[t]);
    }
    out << "\n";
  }
}

void write_weights_csv(OutputGuard& guard, const std::string& path,
                       const LdfTrace& trace) {
  std::ofstream out = guard.open(path);
  out << "t";
  for (int k = 1; k <= trace.pool_size; ++k) out << ",w_" << k;
  out << "\n";
  for (int t = 0; t < trace.horizon; ++t) {
    out << t;
    for (double w : trace.base_weights[static_cast<std::size_t>(t)]) {
      out << "," << format_double(w);
    }
    out << "\n";
  }
}

struct CommonConfig {
  std::string output_dir;
  int calibration = 0;
  par::Exec exec;
  std::vector<MethodSpec> methods;
  std::vector<std::uint64_t> seeds;
};

CommonConfig parse_common(const json& j, const RunOverrides& overrides) {
  CommonConfig c;
  c.output_dir = overrides.output_dir
                     ? *overrides.output_dir
                     : j.at("output_dir").get<std::string>();
  if (j.contains("calibration")) c.calibration = j.at("calibration").get<int>();
  int threads = 1;
  if (j.contains("threads")) threads = j.at("threads").get<int>();
  if (overrides.threads) threads = *overrides.threads;
  c.exec = par::Exec{threads};
  if (!j.at("methods").is_array() || j.at("methods").empty()) {
    throw std::invalid_argument("config: methods must be a non-empty array");
  }
  std::set<std::string> names;
  for (const auto& mj : j.at("methods")) {
    c.methods.push_back(parse_method(mj));
    if (!names.insert(c.methods.back().name).second) {
      throw std::invalid_argument("config: duplicate method name '" +
                                  c.methods.back().name + "'");
    }
  }
  if (j.contains("seeds")) {
    c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  }
  if (!overrides.seeds.empty()) c.seeds = overrides.seeds;
  return c;
}

DgpParams parse_dgp(const json& j) {
  check_keys(j,
             {"phi_x", "sigma_x", "sigma_y", "sigma_obs", "eta", "K", "T"},
             "panel.dgp");
  const int K = j.value("K", 20);
  const int T = j.value("T", 2001);
  DgpParams p = DgpParams::study_defaults(K, T);
  if (j.contains("phi_x")) p.phi_x = j.at("phi_x").get<double>();
  if (j.contains("sigma_x")) p.sigma_x = j.at("sigma_x").get<double>();
  if (j.contains("sigma_y")) p.sigma_y = j.at("sigma_y").get<double>();
  if (j.contains("sigma_obs")) {
    if (j.at("sigma_obs").is_number()) {
      p.sigma_obs.assign(static_cast<std::size_t>(K), j.at("sigma_obs").get<double>());
    } else {
      p.sigma_obs = j.at("sigma_obs").get<std::vector<double>>();
    }
  }
  if (j.contains("eta")) p.eta = j.at("eta").get<std::vector<double>>();
  p.validate();
  return p;
}

// Levels spec for the simulate experiment: fixed schedule or Markov chain.
struct LevelsConfig {
  bool markov = false;
  MarkovLevelSpec spec;
};

LevelsConfig parse_levels(const json& j) {
  check_keys(j, {"kind", "states", "diag", "diag_before", "diag_after", "change_at"},
             "panel.levels");
  LevelsConfig out;
  const std::string kind = j.value("kind", std::string("fixed"));
  if (kind == "fixed") return out;
  if (kind != "markov") {
    throw std::invalid_argument("config: levels.kind must be 'fixed' or 'markov'");
  }
  out.markov = true;
  std::vector<double> states = {-1.0, 0.0, 1.0};
  if (j.contains("states")) states = j.at("states").get<std::vector<double>>();
  if (j.contains("diag")) {
    out.spec = MarkovLevelSpec::constant(states, j.at("diag").get<double>());
  } else {
    out.spec = MarkovLevelSpec::two_regime(
        states, j.at("diag_before").get<double>(), j.at("diag_after").get<double>(),
        j.at("change_at").get<int>());
  }
  return out;
}

std::vector<std::string> run_simulate(const json& j, const RunOverrides& overrides) {
  check_keys(j,
             {"experiment", "output_dir", "calibration", "threads", "seeds",
              "panel", "methods"},
             "top level");
  CommonConfig common = parse_common(j, overrides);
  if (common.seeds.empty()) {
    throw std::invalid_argument("config: simulate needs a non-empty seed list");
  }
  const json& pj = j.at("panel");
  check_keys(pj, {"dgp", "levels"}, "panel");
  const DgpParams params = parse_dgp(pj.at("dgp"));
  const LevelsConfig levels =
      pj.contains("levels") ? parse_levels(pj.at("levels")) : LevelsConfig{};

  const std::size_t R = common.seeds.size();
  std::vector<ForecastPanel> panels(R);
  par::for_index(R, common.exec, [&](std::size_t r) {
    if (levels.markov) {
      panels[r] = simulate_markov_study(params, levels.spec, common.seeds[r]).panel;
    } else {
      panels[r] =
          simulate_panel(params, fixed_level_path(params.T), common.seeds[r]).panel;
    }
  });

  const std::size_t M = common.methods.size();
  std::vector<std::vector<std::vector<double>>> scores(M);  // [m][r][t]
  std::vector<LdfTrace> first_trace(M);
  for (auto& s : scores) s.resize(R);
  par::for_index(M * R, common.exec, [&](std::size_t cell) {
    const std::size_t m = cell / R;
    const std::size_t r = cell % R;
    LdfTrace trace = run_method(common.methods[m], panels[r],
                                ScoreFunction::log_score(), par::serial());
    scores[m][r] = trace.scores;
    if (r == 0) first_trace[m] = std::move(trace);
  });

  fs::create_directories(common.output_dir);
  OutputGuard guard;
  std::vector<SummaryRow> rows;
  for (std::size_t m = 0; m < M; ++m) {
    const std::string base = common.output_dir + "/";
    write_scores_csv(guard, base + "scores_" + common.methods[m].name + ".csv",
                     common.seeds, scores[m]);
    write_weights_csv(guard, base + "weights_" + common.methods[m].name + ".csv",
                      first_trace[m]);
    rows.push_back(summarize(common.methods[m].name, common.calibration, scores[m]));
  }
  {
    std::ofstream out = guard.open(common.output_dir + "/summary.csv");
    write_summary(out, rows);
  }
  guard.disarm();
  return guard.files();
}

void run_combine_on_panel(const ForecastPanel& panel, const CommonConfig& common,
                          const ScoreFunction& score, OutputGuard& guard) {
  const std::size_t M = common.methods.size();
  std::vector<LdfTrace> traces(M);
  par::for_index(M, common.exec, [&](std::size_t m) {
    traces[m] = run_method(common.methods[m], panel, score, par::serial());
  });

  std::vector<SummaryRow> rows;
  for (std::size_t m = 0; m < M; ++m) {
    const std::string base = common.output_dir + "/";
    write_scores_csv(guard, base + "scores_" + common.methods[m].name + ".csv",
                     {}, {traces[m].scores});
    write_weights_csv(guard, base + "weights_" + common.methods[m].name + ".csv",
                      traces[m]);
    rows.push_back(
        summarize(common.methods[m].name, common.calibration, {traces[m].scores}));
  }
  {
    std::ofstream out = guard.open(common.output_dir + "/summary.csv");
    write_summary(out, rows);
  }
}

std::vector<std::string> run_combine(const json& j, const RunOverrides& overrides) {
  check_keys(j,
             {"experiment", "output_dir", "calibration", "threads", "panel",
              "methods"},
             "top level");
  CommonConfig common = parse_common(j, overrides);
  const json& pj = j.at("panel");
  check_keys(pj, {"csv"}, "panel");
  const ForecastPanel panel = load_panel_csv(pj.at("csv").get<std::string>());

  fs::create_directories(common.output_dir);
  OutputGuard guard;
  run_combine_on_panel(panel, common, ScoreFunction::log_score(), guard);
  guard.disarm();
  return guard.files();
}

UniverseGrids parse_universe(const json& j, int n_x, int n_xx) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "restricted") return restricted_universe();
    if (name == "fx_small") return small_fx_universe();
    if (name == "fx_large") return large_fx_universe();
    throw std::invalid_argument("config: unknown universe '" + name + "'");
  }
  check_keys(j,
             {"gamma1", "gamma2", "gamma3", "gamma_exog", "lambda", "kappa", "p",
              "alpha"},
             "universe");
  UniverseGrids g;
  g.gamma1 = j.at("gamma1").get<std::vector<double>>();
  g.gamma2 = j.at("gamma2").get<std::vector<double>>();
  g.gamma3 = j.at("gamma3").get<std::vector<double>>();
  g.gamma_exog = j.at("gamma_exog").get<std::vector<std::vector<double>>>();
  g.lambda = j.at("lambda").get<std::vector<double>>();
  g.kappa = j.at("kappa").get<std::vector<double>>();
  g.p = j.at("p").get<std::vector<int>>();
  g.alpha = j.value("alpha", std::vector<double>{1.0});
  if (static_cast<int>(g.gamma_exog.size()) != n_x + n_xx) {
    throw std::invalid_argument(
        "config: universe.gamma_exog must list one grid per exogenous variable");
  }
  return g;
}

VarData parse_var_data(const std::string& path, int m, int n_x, int n_xx) {
  std::vector<std::string> header;
  const Eigen::MatrixXd table = load_matrix_csv(path, &header);
  auto col = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    throw std::invalid_argument(path + ": missing column '" + name + "'");
  };
  VarData data;
  data.endo.resize(table.rows(), m);
  for (int i = 0; i < m; ++i) {
    data.endo.col(i) = table.col(col("r_" + std::to_string(i + 1)));
  }
  for (int x = 0; x < n_x; ++x) {
    Eigen::MatrixXd e(table.rows(), m);
    for (int i = 0; i < m; ++i) {
      e.col(i) = table.col(
          col("x" + std::to_string(x + 1) + "_" + std::to_string(i + 1)));
    }
    data.exog_asset.push_back(std::move(e));
  }
  data.exog_common.resize(table.rows(), n_xx);
  for (int x = 0; x < n_xx; ++x) {
    data.exog_common.col(x) = table.col(col("g_" + std::to_string(x + 1)));
  }
  return data;
}

std::vector<std::string> run_tvpvar(const json& j, const RunOverrides& overrides) {
  check_keys(j,
             {"experiment", "output_dir", "calibration", "threads", "data",
              "universe", "forecast", "methods", "write_panel"},
             "top level");
  CommonConfig common = parse_common(j, overrides);
  const json& dj = j.at("data");
  check_keys(dj, {"csv", "m", "n_x", "n_xx"}, "data");
  const int m = dj.at("m").get<int>();
  const int n_x = dj.value("n_x", 0);
  const int n_xx = dj.value("n_xx", 0);
  const VarData data = parse_var_data(dj.at("csv").get<std::string>(), m, n_x, n_xx);
  const UniverseGrids grids = parse_universe(j.at("universe"), n_x, n_xx);
  const std::vector<TvpVarSpec> specs = enumerate_universe(grids, m, n_x, n_xx);

  UniverseForecastOptions options;
  if (j.contains("forecast")) {
    const json& fj = j.at("forecast");
    check_keys(fj, {"calibration", "standardize"}, "forecast");
    if (fj.contains("calibration")) {
      options.calibration = fj.at("calibration").get<int>();
    }
    if (fj.contains("standardize")) {
      options.standardize = fj.at("standardize").get<bool>();
    }
  }
  const ForecastPanel panel =
      universe_forecasts(data, specs, options, common.exec);

  fs::create_directories(common.output_dir);
  OutputGuard guard;
  if (j.value("write_panel", false)) {
    const std::string path = common.output_dir + "/panel.csv";
    save_panel_csv(panel, path);
    guard.track(path);
  }
  run_combine_on_panel(panel, common, ScoreFunction::log_score(), guard);
  guard.disarm();
  return guard.files();
}

std::vector<std::string> run_portfolio(const json& j, const RunOverrides& overrides) {
  check_keys(j,
             {"experiment", "output_dir", "calibration", "threads", "panel",
              "methods", "score", "portfolio"},
             "top level");
  CommonConfig common = parse_common(j, overrides);
  const json& pj = j.at("panel");
  check_keys(pj, {"csv"}, "panel");
  const ForecastPanel panel = load_panel_csv(pj.at("csv").get<std::string>());

  PortfolioConfig pc;
  if (j.contains("portfolio")) {
    const json& cj = j.at("portfolio");
    check_keys(cj,
               {"target_vol", "transaction_cost", "periods_per_year",
                "sharpe_window"},
               "portfolio");
    if (cj.contains("target_vol")) pc.target_vol = cj.at("target_vol").get<double>();
    if (cj.contains("transaction_cost")) {
      pc.transaction_cost = cj.at("transaction_cost").get<double>();
    }
    if (cj.contains("periods_per_year")) {
      pc.periods_per_year = cj.at("periods_per_year").get<int>();
    }
    if (cj.contains("sharpe_window")) {
      pc.sharpe_window = cj.at("sharpe_window").get<int>();
    }
  }
  const std::string score_kind = j.value("score", std::string("log"));
  const ScoreFunction score = make_score(score_kind, pc);
  if (score_kind == "focused") {
    for (const auto& m : common.methods) {
      if (m.type != "ldf" && m.type != "ldf_infinity") {
        throw std::invalid_argument(
            "config: focused scoring applies to ldf methods only");
      }
    }
  }

  const std::size_t M = common.methods.size();
  std::vector<LdfTrace> traces(M);
  par::for_index(M, common.exec, [&](std::size_t m) {
    traces[m] = run_method(common.methods[m], panel, score, par::serial());
  });

  fs::create_directories(common.output_dir);
  OutputGuard guard;
  std::vector<SummaryRow> rows;
  std::ostringstream portfolio_rows;
  for (std::size_t m = 0; m < M; ++m) {
    const std::string base = common.output_dir + "/";
    write_scores_csv(guard, base + "scores_" + common.methods[m].name + ".csv",
                     {}, {traces[m].scores});
    rows.push_back(
        summarize(common.methods[m].name, common.calibration, {traces[m].scores}));

    const BacktestResult bt =
        portfolio_backtest(traces[m].combined, panel.y, pc);
    std::ofstream out =
        guard.open(base + "wealth_" + common.methods[m].name + ".csv");
    out << "t,gross,net,turnover,wealth\n";
    for (std::size_t t = 0; t < bt.net.size(); ++t) {
      out << t << "," << format_double(bt.gross[t]) << ","
          << format_double(bt.net[t]) << "," << format_double(bt.turnover[t])
          << "," << format_double(bt.wealth[t]) << "\n";
    }
    auto [mean_net, sd_net] = mean_sd(bt.net);
    (void)mean_net;
    portfolio_rows << common.methods[m].name << ","
                   << format_double(bt.sharpe_net) << ","
                   << format_double(bt.sharpe_gross) << ","
                   << format_double(bt.wealth.back()) << ","
                   << format_double(sd_net * std::sqrt(static_cast<double>(
                                                 pc.periods_per_year)))
                   << "," << (bt.zero_std ? 1 : 0) << "\n";
  }
  {
    std::ofstream out = guard.open(common.output_dir + "/summary.csv");
    write_summary(out, rows);
  }
  {
    std::ofstream out = guard.open(common.output_dir + "/portfolio_summary.csv");
    out << "method,sharpe_net,sharpe_gross,final_wealth,realized_ann_vol,zero_std\n";
    out << portfolio_rows.str();
  }
  guard.disarm();
  return guard.files();
}

}  // namespace

namespace {

std::vector<std::string> dispatch(const std::string& config_path,
                                  const std::string& expected_kind,
                                  const RunOverrides& overrides) {
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error(config_path + ": cannot open");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(config_path + ": " + e.what());
  }
  const std::string kind = j.at("experiment").get<std::string>();
  if (!expected_kind.empty() && kind != expected_kind) {
    throw std::invalid_argument("config: experiment kind is '" + kind +
                                "', expected '" + expected_kind + "'");
  }
  if (kind == "simulate") return run_simulate(j, overrides);
  if (kind == "combine") return run_combine(j, overrides);
  if (kind == "tvpvar") return run_tvpvar(j, overrides);
  if (kind == "portfolio") return run_portfolio(j, overrides);
  throw std::invalid_argument("config: unknown experiment '" + kind + "'");
}

}  // namespace

std::vector<std::string> run_experiment(const std::string& config_path,
                                        const RunOverrides& overrides) {
  return dispatch(config_path, "", overrides);
}

std::vector<std::string> run_experiment_checked(const std::string& config_path,
                                                const std::string& expected_kind,
                                                const RunOverrides& overrides) {
  return dispatch(config_path, expected_kind, overrides);
}

void report_summary(const std::string& output_dir, bool check) {
  const std::string summary_path = output_dir + "/summary.csv";
  std::ifstream in(summary_path);
  if (!in) throw std::runtime_error(summary_path + ": cannot open");
  std::string existing((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());

  // Method order and calibration come from the existing summary.
  std::vector<SummaryRow> rows;
  std::istringstream lines(existing);
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string method, calib;
    std::getline(ss, method, ',');
    std::getline(ss, calib, ',');
    const int s = std::stoi(calib);

    std::vector<std::string> header;
    const Eigen::MatrixXd table =
        load_matrix_csv(output_dir + "/scores_" + method + ".csv", &header);
    std::vector<std::vector<double>> per_seed;
    for (Eigen::Index c = 1; c < table.cols(); ++c) {
      std::vector<double> scores(static_cast<std::size_t>(table.rows()));
      for (Eigen::Index r = 0; r < table.rows(); ++r) {
        scores[static_cast<std::size_t>(r)] = table(r, c);
      }
      per_seed.push_back(std::move(scores));
    }
    rows.push_back(summarize(method, s, per_seed));
  }

  const std::string recomputed = summary_text(rows);
  if (check) {
    if (recomputed != existing) {
      throw std::runtime_error(
          "report: summary.csv does not match the emitted score series");
    }
    return;
  }
  std::ofstream out(summary_path);
  if (!out) throw std::runtime_error(summary_path + ": cannot open for writing");
  out << recomputed;
}

}  // namespace ldf
