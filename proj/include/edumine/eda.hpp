#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edumine/dataset.hpp"

namespace edumine::eda {

struct Descriptives {
  std::size_t n = 0;
  double mean = 0.0;
  double std_dev = 0.0;  // sample (n - 1) denominator; 0 when n == 1
};

struct GroupDescriptives {
  std::string group;  // empty when ungrouped
  Descriptives stats;
};

Descriptives describe(std::span<const double> values);

/// Per-group statistics over the non-missing cells of an interval column.
/// Rows whose group label is missing are skipped; groups are sorted by label.
std::vector<GroupDescriptives> descriptives(const Dataset& data, std::string_view column,
                                            std::optional<std::string_view> group_by = std::nullopt);

// Correlation strength bands on |r|.
enum class Band { low, moderate, high, very_high };

std::string_view to_string(Band band);

/// very_high: |r| > 0.70, high: 0.60 < |r| <= 0.70, moderate: 0.50 < |r| <= 0.60,
/// low otherwise.
Band band_of(double r);

struct CorrelationResult {
  double r = 0.0;
  std::size_t n_pairs = 0;
  Band band = Band::low;

  double r_squared() const { return r * r; }
};

/// Sample Pearson r of two equally long vectors (no missing handling).
double pearson_r(std::span<const double> x, std::span<const double> y);

/// Pearson r over the rows where both columns are present.
CorrelationResult pearson(const Dataset& data, std::string_view col_a, std::string_view col_b);

struct AnovaResult {
  double f_stat = 0.0;
  int df_between = 0;
  int df_within = 0;
  double p_value = 1.0;
  double ss_between = 0.0;
  double ss_within = 0.0;
};

AnovaResult anova_one_way(std::span<const std::vector<double>> groups);
AnovaResult anova_one_way(const Dataset& data, std::string_view value_col, std::string_view group_col);

}  // namespace edumine::eda
