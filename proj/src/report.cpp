#include "edumine/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "edumine/artifact.hpp"

namespace edumine::report {

using nlohmann::json;

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

bool numeric_cell(const std::string& cell) {
  if (cell.empty() || cell == "NaN" || cell == "inf" || cell == "-inf" || cell == "<.0001") return true;
  char* end = nullptr;
  std::strtod(cell.c_str(), &end);
  return end == cell.c_str() + cell.size();
}

std::string p_text(double p) {
  if (p < 1e-4) return "<.0001";
  return fixed(p, 4);
}

}  // namespace

TextTable::TextTable(std::vector<std::string> headers) : headers_(std::move(headers)) {}

void TextTable::add(std::vector<std::string> row) {
  row.resize(headers_.size());
  rows_.push_back(std::move(row));
}

std::string TextTable::render() const {
  std::vector<std::size_t> width(headers_.size(), 0);
  std::vector<bool> right(headers_.size(), true);
  for (std::size_t c = 0; c < headers_.size(); ++c) {
    width[c] = headers_[c].size();
    for (const auto& r : rows_) {
      width[c] = std::max(width[c], r[c].size());
      if (!numeric_cell(r[c])) right[c] = false;
    }
  }
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    std::string text;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) text += "  ";
      const std::string pad(width[c] - cells[c].size(), ' ');
      text += right[c] ? pad + cells[c] : cells[c] + pad;
    }
    while (!text.empty() && text.back() == ' ') text.pop_back();
    out << text << '\n';
  };
  line(headers_);
  std::vector<std::string> rule;
  for (auto w : width) rule.emplace_back(w, '-');
  line(rule);
  for (const auto& r : rows_) line(r);
  return out.str();
}

std::string fixed(double value, int decimals) {
  if (std::isnan(value)) return "NaN";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string s = buf;
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

std::string_view display_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::tree: return "Decision Tree";
    case ModelKind::regression: return "Regression";
    case ModelKind::neural: return "Neural Network";
  }
  return "?";
}

std::string champion_text(const evaluation::ChampionReport& report) {
  std::ostringstream out;
  out << "Model comparison";
  if (!report.target.empty()) out << " (target: " << report.target << ")";
  out << "\nSelection criterion: " << report.criterion << "\n\n";
  TextTable table({"Selected", "Model", "Valid: ASE"});
  for (const auto& c : report.candidates)
    table.add({c.kind == report.champion ? "Yes" : "", std::string(display_name(c.kind)), fixed(c.validation_ase, 2)});
  out << table.render();
  return out.str();
}

json champion_json(const evaluation::ChampionReport& report) {
  json doc = {{"tool_version", kToolVersion},
              {"report", "model_comparison"},
              {"target", report.target},
              {"selection_criterion", report.criterion},
              {"champion", to_string(report.champion)}};
  json rows = json::array();
  for (const auto& c : report.candidates)
    rows.push_back({{"model_kind", to_string(c.kind)},
                    {"validation_ase", number_or_null(c.validation_ase)},
                    {"selected", c.kind == report.champion}});
  doc["candidates"] = std::move(rows);
  return doc;
}

std::string evaluation_text(const evaluation::EvaluationReport& report, std::size_t top) {
  std::ostringstream out;
  out << "Mean Absolute Percentage Error (predicted vs actual)\n\n";
  const std::string denom = report.denominator == evaluation::MapeDenominator::prediction
                                ? "prediction"
                                : "actual (conventional, differs from the default)";
  TextTable summary({"Measure", "Value"});
  summary.add({"Target", report.target});
  summary.add({"Rows scored", std::to_string(report.n_scored)});
  summary.add({"Rows excluded (actual <= 0)", std::to_string(report.excluded_rows)});
  summary.add({"Rows without actual", std::to_string(report.missing_actual)});
  summary.add({"MAPE denominator", denom});
  summary.add({"MAPE (%)", fixed(report.mape, 2)});
  summary.add({"ASE", fixed(report.ase, 2)});
  out << summary.render();

  out << "\nVariable worth (decision tree, weighted variance reduction, max = 1)\n\n";
  TextTable worth({"Rank", "Variable", "Worth"});
  std::size_t rank = 0;
  for (const auto& w : report.worth) {
    if (rank == top || w.worth <= 0.0) break;
    ++rank;
    worth.add({std::to_string(rank), w.variable, fixed(w.worth, 4)});
  }
  if (rank == 0)
    out << "(tree has no splits)\n";
  else
    out << worth.render();
  return out.str();
}

json evaluation_json(const evaluation::EvaluationReport& report) {
  json worth = json::array();
  for (const auto& w : report.worth) worth.push_back({{"variable", w.variable}, {"worth", w.worth}});
  return {{"tool_version", kToolVersion},
          {"report", "evaluation"},
          {"target", report.target},
          {"n_scored", report.n_scored},
          {"excluded_rows", report.excluded_rows},
          {"missing_actual", report.missing_actual},
          {"mape_denominator", to_string(report.denominator)},
          {"mape", number_or_null(report.mape)},
          {"ase", number_or_null(report.ase)},
          {"variable_worth", std::move(worth)}};
}

EdaReport build_eda(const Dataset& data, std::optional<std::string_view> group_by, double alpha) {
  EdaReport report;
  report.alpha = alpha;
  std::vector<std::string> columns;
  for (const auto& s : data.schema())
    if (s.numeric() && s.role == Role::target) columns.push_back(s.name);
  if (columns.empty())
    for (const auto& s : data.schema())
      if (s.numeric() && s.role == Role::input) columns.push_back(s.name);

  for (const auto& name : columns) {
    DescriptivesRow row{name, {}};
    try {
      row.groups = eda::descriptives(data, name);
      if (group_by) {
        auto per_group = eda::descriptives(data, name, group_by);
        row.groups.insert(row.groups.end(), per_group.begin(), per_group.end());
      }
    } catch (const DataError& e) {
      report.notes.push_back(name + ": " + e.what());
      continue;
    }
    report.descriptives.push_back(std::move(row));
    if (group_by) {
      try {
        report.anova.push_back({name, std::string(*group_by), eda::anova_one_way(data, name, *group_by)});
      } catch (const DataError& e) {
        report.notes.push_back("ANOVA " + name + " by " + std::string(*group_by) + ": " + e.what());
      }
    }
  }
  for (std::size_t i = 0; i < columns.size(); ++i)
    for (std::size_t j = i + 1; j < columns.size(); ++j) {
      try {
        report.correlations.push_back({columns[i], columns[j], eda::pearson(data, columns[i], columns[j])});
      } catch (const DataError& e) {
        report.notes.push_back("correlation " + columns[i] + " / " + columns[j] + ": " + e.what());
      }
    }
  return report;
}

std::string eda_text(const EdaReport& report) {
  std::ostringstream out;
  out << "Descriptive statistics (sample standard deviation)\n\n";
  TextTable desc({"Variable", "Group", "N", "Mean", "Std Dev"});
  for (const auto& row : report.descriptives)
    for (const auto& g : row.groups)
      desc.add({row.variable, g.group.empty() ? "(all)" : g.group, std::to_string(g.stats.n), fixed(g.stats.mean, 2),
                fixed(g.stats.std_dev, 2)});
  out << desc.render();

  if (!report.anova.empty()) {
    out << "\nOne-way ANOVA (display threshold p < " << fixed(report.alpha, 2) << ")\n\n";
    TextTable anova({"Variable", "Group by", "F", "df", "p-value", "Below threshold"});
    for (const auto& a : report.anova)
      anova.add({a.variable, a.group_by, fixed(a.result.f_stat, 4),
                 std::to_string(a.result.df_between) + ", " + std::to_string(a.result.df_within),
                 p_text(a.result.p_value), a.result.p_value < report.alpha ? "yes" : "no"});
    out << anova.render();
  }

  if (!report.correlations.empty()) {
    out << "\nPearson correlation (pairwise complete; bands on |r|: very high > 0.70, high > 0.60, "
           "moderate > 0.50)\n\n";
    TextTable corr({"Pair", "N", "R", "R^2", "Band"});
    for (const auto& c : report.correlations)
      corr.add({c.a + " / " + c.b, std::to_string(c.result.n_pairs), fixed(c.result.r, 4),
                fixed(c.result.r_squared(), 4), std::string(eda::to_string(c.result.band))});
    out << corr.render();
  }

  if (!report.notes.empty()) {
    out << "\nNot computed:\n";
    for (const auto& n : report.notes) out << "  " << n << '\n';
  }
  return out.str();
}

json eda_json(const EdaReport& report) {
  json desc = json::array();
  for (const auto& row : report.descriptives) {
    json groups = json::array();
    for (const auto& g : row.groups)
      groups.push_back({{"group", g.group.empty() ? json(nullptr) : json(g.group)},
                        {"n", g.stats.n},
                        {"mean", g.stats.mean},
                        {"std_dev", g.stats.std_dev}});
    desc.push_back({{"variable", row.variable}, {"groups", std::move(groups)}});
  }
  json anova = json::array();
  for (const auto& a : report.anova)
    anova.push_back({{"variable", a.variable},
                     {"group_by", a.group_by},
                     {"f_stat", number_or_null(a.result.f_stat)},
                     {"df_between", a.result.df_between},
                     {"df_within", a.result.df_within},
                     {"p_value", a.result.p_value},
                     {"ss_between", a.result.ss_between},
                     {"ss_within", a.result.ss_within}});
  json corr = json::array();
  for (const auto& c : report.correlations)
    corr.push_back({{"a", c.a},
                    {"b", c.b},
                    {"n_pairs", c.result.n_pairs},
                    {"r", c.result.r},
                    {"r_squared", c.result.r_squared()},
                    {"band", eda::to_string(c.result.band)}});
  return {{"tool_version", kToolVersion}, {"report", "eda"},        {"alpha", report.alpha},
          {"descriptives", std::move(desc)}, {"anova", std::move(anova)}, {"correlations", std::move(corr)},
          {"notes", report.notes}};
}

}  // namespace edumine::report
