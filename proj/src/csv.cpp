#include "ldf/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace ldf {

namespace {

[[noreturn]] void fail(const std::string& path, int row, const std::string& column,
                       const std::string& what) {
  throw std::runtime_error(path + ": row " + std::to_string(row) + ", column '" +
                           column + "': " + what);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& cell, const std::string& path, int row,
                    const std::string& column) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    fail(path, row, column, "expected a number, got '" + cell + "'");
  }
  return value;
}

long parse_int(const std::string& cell, const std::string& path, int row,
               const std::string& column) {
  long value = 0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    fail(path, row, column, "expected an integer, got '" + cell + "'");
  }
  return value;
}

struct ModelColumns {
  std::string prefix;      // k<id>
  int kind = -1;
  int mean = -1;           // univariate
  int var = -1;
  int dof = -1;            // optional
  std::vector<int> mean_multi;          // mvgaussian mean_i
  std::vector<std::vector<int>> var_multi;  // mvgaussian var_i_j
};

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

ForecastPanel load_panel_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  const std::vector<std::string> header = split_line(line);

  int t_col = -1;
  std::vector<int> y_cols;
  std::vector<ModelColumns> models;
  auto model_slot = [&](const std::string& prefix) -> ModelColumns& {
    for (auto& m : models) {
      if (m.prefix == prefix) return m;
    }
    models.push_back({});
    models.back().prefix = prefix;
    return models.back();
  };

  for (int j = 0; j < static_cast<int>(header.size()); ++j) {
    const std::string& name = header[static_cast<std::size_t>(j)];
    if (name == "t") {
      t_col = j;
    } else if (name == "y") {
      y_cols.assign(1, j);
    } else if (name.rfind("y_", 0) == 0) {
      const std::size_t i = static_cast<std::size_t>(std::stoi(name.substr(2)));
      if (y_cols.size() < i) y_cols.resize(i, -1);
      y_cols[i - 1] = j;
    } else if (name.rfind("k", 0) == 0 && name.find('_') != std::string::npos) {
      const std::string prefix = name.substr(0, name.find('_'));
      const std::string field = name.substr(name.find('_') + 1);
      ModelColumns& m = model_slot(prefix);
      if (field == "kind") {
        m.kind = j;
      } else if (field == "mean") {
        m.mean = j;
      } else if (field == "var") {
        m.var = j;
      } else if (field == "dof") {
        m.dof = j;
      } else if (field.rfind("mean_", 0) == 0) {
        const std::size_t i = static_cast<std::size_t>(std::stoi(field.substr(5)));
        if (m.mean_multi.size() < i) m.mean_multi.resize(i, -1);
        m.mean_multi[i - 1] = j;
      } else if (field.rfind("var_", 0) == 0) {
        const std::string rest = field.substr(4);
        const std::size_t sep = rest.find('_');
        if (sep == std::string::npos) {
          throw std::runtime_error(path + ": malformed header column '" + name + "'");
        }
        const std::size_t r = static_cast<std::size_t>(std::stoi(rest.substr(0, sep)));
        const std::size_t c = static_cast<std::size_t>(std::stoi(rest.substr(sep + 1)));
        if (m.var_multi.size() < r) m.var_multi.resize(r);
        for (auto& rowv : m.var_multi) {
          if (rowv.size() < std::max(c, m.var_multi.size())) {
            rowv.resize(std::max(c, m.var_multi.size()), -1);
          }
        }
        m.var_multi[r - 1][c - 1] = j;
      } else {
        throw std::runtime_error(path + ": unknown header column '" + name + "'");
      }
    } else {
      throw std::runtime_error(path + ": unknown header column '" + name + "'");
    }
  }
  if (t_col < 0) throw std::runtime_error(path + ": missing column 't'");
  if (y_cols.empty()) throw std::runtime_error(path + ": missing realization column");
  for (int c : y_cols) {
    if (c < 0) throw std::runtime_error(path + ": gap in y_<i> columns");
  }
  if (models.empty()) throw std::runtime_error(path + ": no model columns");
  for (const auto& m : models) {
    if (m.kind < 0) {
      throw std::runtime_error(path + ": missing column '" + m.prefix + "_kind'");
    }
  }

  ForecastPanel panel;
  int row = 1;
  long expected_t = -1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size()) fail(path, row, "", "cell count mismatch");
    auto cell = [&](int j) -> const std::string& {
      return cells[static_cast<std::size_t>(j)];
    };

    const long t = parse_int(cell(t_col), path, row, "t");
    if (expected_t >= 0 && t != expected_t) {
      fail(path, row, "t", "rows must be ascending with no gaps");
    }
    expected_t = (expected_t < 0 ? t : expected_t) + 1;

    Eigen::VectorXd y(static_cast<Eigen::Index>(y_cols.size()));
    for (std::size_t i = 0; i < y_cols.size(); ++i) {
      y[static_cast<Eigen::Index>(i)] =
          parse_double(cell(y_cols[i]), path, row,
                       header[static_cast<std::size_t>(y_cols[i])]);
    }
    panel.y.push_back(std::move(y));

    std::vector<PredictiveDensity> densities;
    densities.reserve(models.size());
    for (const auto& m : models) {
      const std::string kind = cell(m.kind);
      try {
        if (kind == "gaussian") {
          if (m.mean < 0 || m.var < 0) {
            fail(path, row, m.prefix, "missing mean/var columns");
          }
          densities.emplace_back(Gaussian{
              parse_double(cell(m.mean), path, row, m.prefix + "_mean"),
              parse_double(cell(m.var), path, row, m.prefix + "_var")});
        } else if (kind == "studentt") {
          if (m.mean < 0 || m.var < 0 || m.dof < 0) {
            fail(path, row, m.prefix, "missing mean/var/dof columns");
          }
          densities.emplace_back(StudentT{
              parse_double(cell(m.mean), path, row, m.prefix + "_mean"),
              parse_double(cell(m.var), path, row, m.prefix + "_var"),
              parse_double(cell(m.dof), path, row, m.prefix + "_dof")});
        } else if (kind == "mvgaussian") {
          const std::size_t dim = m.mean_multi.size();
          if (dim == 0 || m.var_multi.size() != dim) {
            fail(path, row, m.prefix, "missing mean_i/var_i_j columns");
          }
          for (std::size_t i = 0; i < dim; ++i) {
            if (m.mean_multi[i] < 0 || m.var_multi[i].size() < dim) {
              fail(path, row, m.prefix, "missing mean_i/var_i_j columns");
            }
            for (std::size_t j2 = 0; j2 < dim; ++j2) {
              if (m.var_multi[i][j2] < 0) {
                fail(path, row, m.prefix, "missing mean_i/var_i_j columns");
              }
            }
          }
          Eigen::VectorXd mean(static_cast<Eigen::Index>(dim));
          Eigen::MatrixXd cov(static_cast<Eigen::Index>(dim),
                              static_cast<Eigen::Index>(dim));
          for (std::size_t i = 0; i < dim; ++i) {
            mean[static_cast<Eigen::Index>(i)] = parse_double(
                cell(m.mean_multi[i]), path, row,
                m.prefix + "_mean_" + std::to_string(i + 1));
            for (std::size_t j2 = 0; j2 < dim; ++j2) {
              cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j2)) =
                  parse_double(cell(m.var_multi[i][j2]), path, row,
                               m.prefix + "_var_" + std::to_string(i + 1) + "_" +
                                   std::to_string(j2 + 1));
            }
          }
          densities.emplace_back(MvGaussian(std::move(mean), std::move(cov)));
        } else {
          fail(path, row, m.prefix + "_kind", "unknown kind '" + kind + "'");
        }
      } catch (const std::invalid_argument& e) {
        fail(path, row, m.prefix, e.what());
      }
    }
    panel.densities.push_back(std::move(densities));
  }
  panel.validate();
  return panel;
}

void save_panel_csv(const ForecastPanel& panel, const std::string& path) {
  panel.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  const int K = panel.pool_size();
  const auto dim = panel.y.front().size();

  // Column layout per model: union of the kinds that appear for it.
  std::vector<bool> has_dof(static_cast<std::size_t>(K), false);
  std::vector<bool> is_multi(static_cast<std::size_t>(K), false);
  for (const auto& row : panel.densities) {
    for (int k = 0; k < K; ++k) {
      row[static_cast<std::size_t>(k)].visit([&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, StudentT>) {
          has_dof[static_cast<std::size_t>(k)] = true;
        } else if constexpr (std::is_same_v<T, MvGaussian>) {
          is_multi[static_cast<std::size_t>(k)] = true;
        } else if constexpr (std::is_same_v<T, Mixture>) {
          throw std::invalid_argument(
              "save_panel_csv: mixture densities are not serialisable");
        }
      });
    }
  }

  out << "t";
  if (dim == 1) {
    out << ",y";
  } else {
    for (Eigen::Index i = 1; i <= dim; ++i) out << ",y_" << i;
  }
  for (int k = 0; k < K; ++k) {
    const std::string p = "k" + std::to_string(k + 1);
    out << "," << p << "_kind";
    if (is_multi[static_cast<std::size_t>(k)]) {
      for (Eigen::Index i = 1; i <= dim; ++i) out << "," << p << "_mean_" << i;
      for (Eigen::Index i = 1; i <= dim; ++i) {
        for (Eigen::Index j = 1; j <= dim; ++j) {
          out << "," << p << "_var_" << i << "_" << j;
        }
      }
    } else {
      out << "," << p << "_mean," << p << "_var";
      if (has_dof[static_cast<std::size_t>(k)]) out << "," << p << "_dof";
    }
  }
  out << "\n";

  for (std::size_t t = 0; t < panel.y.size(); ++t) {
    out << t;
    for (Eigen::Index i = 0; i < dim; ++i) {
      out << "," << format_double(panel.y[t][i]);
    }
    for (int k = 0; k < K; ++k) {
      const auto& d = panel.densities[t][static_cast<std::size_t>(k)];
      d.visit([&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          out << ",gaussian," << format_double(v.mean) << ","
              << format_double(v.variance);
          if (has_dof[static_cast<std::size_t>(k)]) out << ",";
        } else if constexpr (std::is_same_v<T, StudentT>) {
          out << ",studentt," << format_double(v.location) << ","
              << format_double(v.scale) << "," << format_double(v.dof);
        } else if constexpr (std::is_same_v<T, MvGaussian>) {
          out << ",mvgaussian";
          for (Eigen::Index i = 0; i < v.dim(); ++i) {
            out << "," << format_double(v.mean()[i]);
          }
          for (Eigen::Index i = 0; i < v.dim(); ++i) {
            for (Eigen::Index j = 0; j < v.dim(); ++j) {
              out << "," << format_double(v.covariance()(i, j));
            }
          }
        }
      });
    }
    out << "\n";
  }
}

Eigen::MatrixXd load_matrix_csv(const std::string& path,
                                std::vector<std::string>* header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  const std::vector<std::string> names = split_line(line);
  if (header) *header = names;
  std::vector<std::vector<double>> rows;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != names.size()) fail(path, row, "", "cell count mismatch");
    std::vector<double> values(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      values[j] = parse_double(cells[j], path, row, names[j]);
    }
    rows.push_back(std::move(values));
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < names.size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return out;
}

void save_matrix_csv(const Eigen::MatrixXd& values,
                     const std::vector<std::string>& header,
                     const std::string& path) {
  if (static_cast<Eigen::Index>(header.size()) != values.cols()) {
    throw std::invalid_argument("save_matrix_csv: header width mismatch");
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  for (std::size_t j = 0; j < header.size(); ++j) {
    out << (j ? "," : "") << header[j];
  }
  out << "\n";
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      out << (j ? "," : "") << format_double(values(i, j));
    }
    out << "\n";
  }
}

}  // namespace ldf
