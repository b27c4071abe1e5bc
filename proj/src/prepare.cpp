#include "edumine/prepare.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace edumine::models {

namespace {

constexpr std::string_view kMissingLevel = "<missing>";

}  // namespace

std::vector<std::string> Transformer::feature_names() const {
  std::vector<std::string> names;
  for (const auto& e : encodings) {
    if (!e.categorical()) {
      names.push_back(e.variable);
      continue;
    }
    for (const auto& l : e.levels) names.push_back(e.variable + "=" + l);
    if (e.missing_indicator) names.push_back(e.variable + "=" + std::string(kMissingLevel));
  }
  return names;
}

std::size_t Transformer::width() const {
  std::size_t w = 0;
  for (const auto& e : encodings) w += e.width();
  return w;
}

std::vector<std::string> Transformer::inputs() const {
  std::vector<std::string> names;
  for (const auto& e : encodings) names.push_back(e.variable);
  return names;
}

std::string Transformer::schema_fingerprint() const {
  std::string text;
  for (const auto& e : encodings) {
    text += e.variable;
    text += ':';
    text += to_string(e.level);
    for (const auto& l : e.levels) text += "|" + l;
    text += ';';
  }
  return fingerprint(text);
}

Eigen::MatrixXd Transformer::transform(const Dataset& data, bool standardize) const {
  std::vector<std::string> absent;
  for (const auto& e : encodings) {
    auto j = data.find(e.variable);
    if (!j) {
      absent.push_back(e.variable);
      continue;
    }
    if (data.schema()[*j].numeric() == e.categorical())
      throw SchemaError("variable '" + e.variable + "' changed measurement level since training");
  }
  if (!absent.empty()) {
    std::string msg = "data lacks model input variable(s):";
    for (const auto& a : absent) msg += " " + a;
    throw SchemaError(msg);
  }

  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(data.rows()),
                                            static_cast<Eigen::Index>(width()));
  Eigen::Index col = 0;
  for (const auto& e : encodings) {
    const Column& c = data.column(e.variable);
    if (!e.categorical()) {
      for (std::size_t i = 0; i < data.rows(); ++i) {
        const double v = c.missing(i) ? e.fill : c.number(i);
        X(static_cast<Eigen::Index>(i), col) = standardize ? (v - e.fill) / e.scale : v;
      }
      ++col;
      continue;
    }
    for (std::size_t i = 0; i < data.rows(); ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      if (c.missing(i)) {
        if (e.missing_indicator) X(r, col + static_cast<Eigen::Index>(e.levels.size())) = 1.0;
        continue;
      }
      auto it = std::lower_bound(e.levels.begin(), e.levels.end(), c.label(i));
      // Levels never seen in training encode as all zeros.
      if (it != e.levels.end() && *it == c.label(i)) X(r, col + (it - e.levels.begin())) = 1.0;
    }
    col += static_cast<Eigen::Index>(e.width());
  }
  return X;
}

std::vector<std::size_t> target_rows(const Dataset& data, std::string_view target) {
  const auto& spec = data.spec(target);
  if (!spec.numeric()) throw SchemaError("target '" + spec.name + "' is not an interval variable");
  const Column& c = data.column(target);
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < data.rows(); ++i)
    if (!c.missing(i)) rows.push_back(i);
  return rows;
}

Eigen::VectorXd target_values(const Dataset& data, std::string_view target,
                              const std::vector<std::size_t>& rows) {
  const Column& c = data.column(target);
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) y(static_cast<Eigen::Index>(i)) = c.number(rows[i]);
  return y;
}

Transformer fit_transformer(const Dataset& train, std::string_view target,
                            std::vector<std::string>* warnings) {
  const auto rows = target_rows(train, target);
  if (rows.empty()) throw DataError("target '" + std::string(target) + "' has no non-missing training value");

  Transformer t;
  t.target = std::string(target);
  for (std::size_t j = 0; j < train.cols(); ++j) {
    const auto& spec = train.schema()[j];
    if (spec.role != Role::input || spec.name == target) continue;
    const Column& c = train.column(j);

    FeatureEncoding e;
    e.variable = spec.name;
    e.level = spec.level;
    std::size_t present = 0;
    if (spec.numeric()) {
      double sum = 0.0;
      for (auto i : rows)
        if (!c.missing(i)) {
          sum += c.number(i);
          ++present;
        }
      if (present > 0) {
        e.fill = sum / static_cast<double>(present);
        double ss = 0.0;
        for (auto i : rows)
          if (!c.missing(i)) ss += (c.number(i) - e.fill) * (c.number(i) - e.fill);
        const double sd = present > 1 ? std::sqrt(ss / static_cast<double>(present - 1)) : 0.0;
        e.scale = sd > 0.0 ? sd : 1.0;
      }
    } else {
      std::set<std::string> levels;
      for (auto i : rows) {
        if (c.missing(i))
          e.missing_indicator = true;
        else {
          levels.insert(c.label(i));
          ++present;
        }
      }
      e.levels.assign(levels.begin(), levels.end());
    }
    if (present == 0) {
      t.dropped.push_back(spec.name);
      if (warnings) warnings->push_back("input '" + spec.name + "' has no observed training value; dropped");
      continue;
    }
    t.encodings.push_back(std::move(e));
  }
  if (t.encodings.empty()) throw DataError("no usable input variables for target '" + std::string(target) + "'");
  return t;
}

PreparedMatrix prepare(const Dataset& train, std::string_view target, std::vector<std::string>* warnings) {
  PreparedMatrix p;
  p.transformer = fit_transformer(train, target, warnings);
  p.rows = target_rows(train, target);
  p.feature_names = p.transformer.feature_names();
  p.y = target_values(train, target, p.rows);
  p.X = p.transformer.transform(train.take_rows(p.rows));
  return p;
}

}  // namespace edumine::models
