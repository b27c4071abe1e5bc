#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "edumine/dataset.hpp"

namespace edumine::models {

/// How one input variable becomes one or more matrix columns.
struct FeatureEncoding {
  std::string variable;
  Level level = Level::interval;

  // Interval inputs: mean imputation followed by (x - mean) / scale.
  double fill = 0.0;
  double scale = 1.0;

  // Categorical inputs: one indicator per training level, plus one for
  // "missing" when the training rows contained missing cells.
  std::vector<std::string> levels;
  bool missing_indicator = false;

  bool categorical() const { return level != Level::interval; }
  std::size_t width() const { return categorical() ? levels.size() + (missing_indicator ? 1 : 0) : 1; }
};

/// Encoding, imputation and standardization fitted on training rows and
/// replayed unchanged on any later table.
struct Transformer {
  std::string target;
  std::vector<FeatureEncoding> encodings;
  std::vector<std::string> dropped;  // inputs with no observed training value

  std::vector<std::string> feature_names() const;
  std::size_t width() const;

  /// Names of the source variables the transformer reads.
  std::vector<std::string> inputs() const;

  /// Stable digest of the input variables and their levels.
  std::string schema_fingerprint() const;

  /// Encoded matrix for every row of `data`. With `standardize` false,
  /// interval columns are imputed but left in their original units.
  /// Throws SchemaError listing every input variable `data` lacks.
  Eigen::MatrixXd transform(const Dataset& data, bool standardize = true) const;
};

/// Fits a transformer over the rows of `train` whose target is present.
/// Every variable with role `input` (other than the target) is used.
Transformer fit_transformer(const Dataset& train, std::string_view target,
                            std::vector<std::string>* warnings = nullptr);

struct PreparedMatrix {
  std::vector<std::string> feature_names;
  Eigen::MatrixXd X;  // standardized, no missing entries
  Eigen::VectorXd y;
  std::vector<std::size_t> rows;  // source rows kept (target present)
  Transformer transformer;
};

PreparedMatrix prepare(const Dataset& train, std::string_view target,
                       std::vector<std::string>* warnings = nullptr);

/// Rows of `data` whose interval target is present, and their values.
/// Throws SchemaError when the target is absent or not interval.
std::vector<std::size_t> target_rows(const Dataset& data, std::string_view target);
Eigen::VectorXd target_values(const Dataset& data, std::string_view target,
                              const std::vector<std::size_t>& rows);

}  // namespace edumine::models
