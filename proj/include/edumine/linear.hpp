#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "edumine/dataset.hpp"
#include "edumine/prepare.hpp"

namespace edumine::models {

struct LeastSquaresFit {
  Eigen::VectorXd coefficients;
  Eigen::Index rank = 0;
  std::vector<char> aliased;  // per column
};

/// Minimizes |X b - y|^2 with a column-pivoted Householder QR. Columns whose
/// pivot falls below `tolerance` times the largest pivot are treated as
/// aliased and receive a zero coefficient.
LeastSquaresFit fit_least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                  double tolerance = 1e-10);

/// Multiple linear regression. Coefficients are per encoded feature in the
/// original (unstandardized) units, so prediction is
/// intercept + sum(coefficients[j] * x_j) over transformer.transform(data, false).
struct LinearModel {
  Transformer transformer;
  double intercept = 0.0;
  std::vector<double> coefficients;
  std::vector<char> aliased;  // 1 where the column was rank deficient
  double r_squared = 0.0;     // on the training rows
};

LinearModel train_ols(const Dataset& train, std::string_view target);

std::vector<double> predict(const LinearModel& model, const Dataset& data);

}  // namespace edumine::models
