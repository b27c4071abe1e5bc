#include "edumine/select_eval.hpp"

#include <algorithm>
#include <cmath>

namespace edumine::evaluation {

double ase(std::span<const double> pred, std::span<const double> actual) {
  if (pred.size() != actual.size()) throw DataError("ASE inputs differ in length");
  if (pred.empty()) throw DataError("ASE of an empty vector");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += (pred[i] - actual[i]) * (pred[i] - actual[i]);
  return s / static_cast<double>(pred.size());
}

ChampionReport select_champion(std::span<const Candidate> candidates, std::string_view target) {
  if (candidates.empty()) throw DataError("champion selection needs at least one candidate");
  ChampionReport report;
  report.target = std::string(target);
  report.candidates.assign(candidates.begin(), candidates.end());
  for (const auto& c : candidates)
    if (!std::isfinite(c.validation_ase))
      throw DataError("candidate '" + std::string(to_string(c.kind)) + "' has a non-finite validation ASE");
  std::sort(report.candidates.begin(), report.candidates.end(),
            [](const Candidate& a, const Candidate& b) { return a.kind < b.kind; });
  const auto best = std::min_element(report.candidates.begin(), report.candidates.end(),
                                     [](const Candidate& a, const Candidate& b) {
                                       if (a.validation_ase != b.validation_ase) return a.validation_ase < b.validation_ase;
                                       return a.kind < b.kind;
                                     });
  report.champion = best->kind;
  return report;
}

std::string_view to_string(MapeDenominator d) {
  return d == MapeDenominator::prediction ? "prediction" : "actual";
}

MapeDenominator parse_mape_denominator(std::string_view text) {
  if (text == "prediction") return MapeDenominator::prediction;
  if (text == "actual") return MapeDenominator::actual;
  throw DataError("MAPE denominator must be 'prediction' or 'actual', got '" + std::string(text) + "'");
}

MapeResult mape(std::span<const double> pred, std::span<const double> actual, MapeDenominator denominator) {
  if (pred.size() != actual.size()) throw DataError("MAPE inputs differ in length");
  MapeResult r;
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!(actual[i] > 0.0)) {
      ++r.excluded;
      continue;
    }
    const double denom = denominator == MapeDenominator::prediction ? pred[i] : actual[i];
    if (!(denom > 0.0))
      throw DataError("MAPE row " + std::to_string(i + 1) + " has actual " + std::to_string(actual[i]) +
                      " but non-positive prediction " + std::to_string(pred[i]));
    sum += std::fabs(pred[i] - actual[i]) / denom * 100.0;
    ++r.n_scored;
  }
  if (r.n_scored == 0) throw DataError("MAPE undefined: no row has a positive actual value");
  r.mape = sum / static_cast<double>(r.n_scored);
  return r;
}

std::vector<VariableWorth> variable_worth(const models::TreeModel& tree) {
  std::vector<double> raw(tree.variables.size(), 0.0);
  bool any = false;
  for (const auto& n : tree.nodes) {
    if (!n.split) continue;
    raw[n.split->variable] += static_cast<double>(n.size) * n.variance_reduction;
    any = true;
  }
  if (!any) return {};
  const double top = *std::max_element(raw.begin(), raw.end());
  std::vector<VariableWorth> out;
  for (std::size_t v = 0; v < raw.size(); ++v)
    out.push_back({tree.variables[v].name, top > 0.0 ? raw[v] / top : 0.0});
  std::sort(out.begin(), out.end(), [](const VariableWorth& a, const VariableWorth& b) {
    if (a.worth != b.worth) return a.worth > b.worth;
    return a.variable < b.variable;
  });
  return out;
}

EvaluationReport evaluate(std::span<const double> pred, const Dataset& data, std::string_view target,
                          MapeDenominator denominator, const models::TreeModel* worth_source) {
  if (pred.size() != data.rows()) throw DataError("prediction count does not match row count");
  const auto& spec = data.spec(target);
  if (!spec.numeric()) throw SchemaError("target '" + spec.name + "' is not an interval variable");
  const Column& col = data.column(target);

  std::vector<double> p, a;
  EvaluationReport report;
  report.target = std::string(target);
  report.denominator = denominator;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    if (col.missing(i)) {
      ++report.missing_actual;
      continue;
    }
    p.push_back(pred[i]);
    a.push_back(col.number(i));
  }
  if (a.empty()) throw DataError("no row of the scored data has an actual '" + std::string(target) + "'");
  report.ase = ase(p, a);
  const auto m = mape(p, a, denominator);
  report.mape = m.mape;
  report.n_scored = m.n_scored;
  report.excluded_rows = m.excluded;
  if (worth_source) report.worth = variable_worth(*worth_source);
  return report;
}

}  // namespace edumine::evaluation
