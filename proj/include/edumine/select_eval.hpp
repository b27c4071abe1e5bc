#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edumine/artifact.hpp"
#include "edumine/tree.hpp"

namespace edumine::evaluation {

/// Mean of (pred - actual)^2.
double ase(std::span<const double> pred, std::span<const double> actual);

struct Candidate {
  ModelKind kind = ModelKind::tree;
  double validation_ase = 0.0;
};

inline constexpr std::string_view kSelectionCriterion = "Validation: Average Squared Error";

struct ChampionReport {
  std::string target;
  std::vector<Candidate> candidates;  // ordered by kind
  ModelKind champion = ModelKind::tree;
  std::string criterion{kSelectionCriterion};
};

/// Lowest validation ASE wins; ties go to tree, then regression, then neural.
ChampionReport select_champion(std::span<const Candidate> candidates, std::string_view target = {});

enum class MapeDenominator { prediction, actual };

std::string_view to_string(MapeDenominator d);
MapeDenominator parse_mape_denominator(std::string_view text);

struct MapeResult {
  double mape = 0.0;  // percent
  std::size_t n_scored = 0;
  std::size_t excluded = 0;  // rows with actual <= 0
};

/// Mean of |pred - actual| / denominator * 100 over rows with actual > 0.
/// The default divides by the prediction; a non-positive prediction on an
/// included row is an error.
MapeResult mape(std::span<const double> pred, std::span<const double> actual,
                MapeDenominator denominator = MapeDenominator::prediction);

struct VariableWorth {
  std::string variable;
  double worth = 0.0;
};

/// Per variable: sum over its splits of node size * variance reduction,
/// scaled so the largest is 1. Sorted by worth descending then name.
/// Empty for a tree without splits.
std::vector<VariableWorth> variable_worth(const models::TreeModel& tree);

struct EvaluationReport {
  std::string target;
  std::size_t n_scored = 0;
  std::size_t excluded_rows = 0;   // actual <= 0
  std::size_t missing_actual = 0;  // predicted rows with no actual value
  double mape = 0.0;
  double ase = 0.0;
  MapeDenominator denominator = MapeDenominator::prediction;
  std::vector<VariableWorth> worth;
};

/// Compares predictions with the target column of `data` (rows with a
/// missing actual are counted and skipped).
EvaluationReport evaluate(std::span<const double> pred, const Dataset& data, std::string_view target,
                          MapeDenominator denominator = MapeDenominator::prediction,
                          const models::TreeModel* worth_source = nullptr);

}  // namespace edumine::evaluation
