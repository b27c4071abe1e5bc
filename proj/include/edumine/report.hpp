#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "edumine/dataset.hpp"
#include "edumine/eda.hpp"
#include "edumine/select_eval.hpp"

namespace edumine::report {

/// Fixed-width text table; all-numeric columns are right aligned.
class TextTable {
 public:
  explicit TextTable(std::vector<std::string> headers);
  void add(std::vector<std::string> row);
  std::string render() const;

 private:
  std::vector<std::string> headers_;
  std::vector<std::vector<std::string>> rows_;
};

/// printf-style fixed decimals, e.g. fixed(246.094, 2) == "246.09".
std::string fixed(double value, int decimals);

std::string_view display_name(ModelKind kind);

std::string champion_text(const evaluation::ChampionReport& report);
nlohmann::json champion_json(const evaluation::ChampionReport& report);

/// `top` caps the variable-worth list (zero-worth variables are not shown).
std::string evaluation_text(const evaluation::EvaluationReport& report, std::size_t top = 30);
nlohmann::json evaluation_json(const evaluation::EvaluationReport& report);

struct DescriptivesRow {
  std::string variable;
  std::vector<eda::GroupDescriptives> groups;  // overall first, then per group
};

struct AnovaRow {
  std::string variable;
  std::string group_by;
  eda::AnovaResult result;
};

struct CorrelationRow {
  std::string a, b;
  eda::CorrelationResult result;
};

struct EdaReport {
  std::vector<DescriptivesRow> descriptives;
  std::vector<AnovaRow> anova;
  std::vector<CorrelationRow> correlations;
  std::vector<std::string> notes;  // pairs or groups that could not be computed
  double alpha = 0.05;
};

/// Descriptives for every interval target (every interval input when no
/// targets exist), ANOVA across `group_by` levels, and all pairwise
/// correlations among those columns.
EdaReport build_eda(const Dataset& data, std::optional<std::string_view> group_by, double alpha = 0.05);
std::string eda_text(const EdaReport& report);
nlohmann::json eda_json(const EdaReport& report);

}  // namespace edumine::report
