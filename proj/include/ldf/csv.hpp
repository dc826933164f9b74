#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ldf/panel.hpp"

namespace ldf {

// Shortest decimal representation that round-trips the double exactly.
std::string format_double(double x);

// Forecast panel CSV. Header: `t`, then `y` (or `y_1..y_m`), then per model
// a block `k<id>_kind,k<id>_mean,k<id>_var[,k<id>_dof]` for univariate
// models, or `k<id>_kind,k<id>_mean_1..m,k<id>_var_1_1..k<id>_var_m_m` for
// multivariate Gaussians. kind is one of gaussian|studentt|mvgaussian; the
// dof cell is empty for non-Student rows. Rows are ascending in t with no
// gaps. Parse errors name the offending row and column.
ForecastPanel load_panel_csv(const std::string& path);
void save_panel_csv(const ForecastPanel& panel, const std::string& path);

// Plain numeric table with a header row; returns the column names.
Eigen::MatrixXd load_matrix_csv(const std::string& path,
                                std::vector<std::string>* header);
void save_matrix_csv(const Eigen::MatrixXd& values,
                     const std::vector<std::string>& header,
                     const std::string& path);

}  // namespace ldf
