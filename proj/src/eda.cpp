#include "edumine/eda.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>

#include "edumine/special.hpp"

namespace edumine::eda {

namespace {

const Column& interval_column(const Dataset& data, std::string_view name) {
  const auto& spec = data.spec(name);
  if (!spec.numeric())
    throw SchemaError("variable '" + spec.name + "' is not an interval variable");
  return data.column(name);
}

const Column& group_column(const Dataset& data, std::string_view name) {
  const auto& spec = data.spec(name);
  if (spec.numeric() || spec.role == Role::id)
    throw SchemaError("grouping variable '" + spec.name + "' must be nominal, ordinal or binary");
  return data.column(name);
}

bool all_equal(std::span<const double> v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
}

// Sum in sorted order so equal multisets give bit-equal sums.
double sorted_sum(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

Descriptives describe(std::span<const double> values) {
  Descriptives d;
  d.n = values.size();
  if (d.n == 0) throw DataError("descriptive statistics need at least one value");
  double sum = 0.0;
  for (double v : values) sum += v;
  d.mean = sum / static_cast<double>(d.n);
  if (all_equal(values)) {
    d.mean = values.front();
    return d;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - d.mean) * (v - d.mean);
  d.std_dev = std::sqrt(ss / static_cast<double>(d.n - 1));
  return d;
}

std::vector<GroupDescriptives> descriptives(const Dataset& data, std::string_view column,
                                            std::optional<std::string_view> group_by) {
  const Column& values = interval_column(data, column);
  std::map<std::string, std::vector<double>> groups;
  const Column* g = group_by ? &group_column(data, *group_by) : nullptr;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    if (values.missing(i)) continue;
    if (g && g->missing(i)) continue;
    groups[g ? g->label(i) : std::string()].push_back(values.number(i));
  }
  if (groups.empty())
    throw DataError("variable '" + std::string(column) + "' has no non-missing values");
  std::vector<GroupDescriptives> out;
  for (const auto& [label, v] : groups) out.push_back({label, describe(v)});
  return out;
}

std::string_view to_string(Band band) {
  constexpr std::array<std::string_view, 4> names = {"low", "moderate", "high", "very_high"};
  return names[static_cast<std::size_t>(band)];
}

Band band_of(double r) {
  if (!(r >= -1.0 && r <= 1.0)) throw DataError("correlation outside [-1, 1]");
  const double a = std::fabs(r);
  if (a > 0.70) return Band::very_high;
  if (a > 0.60) return Band::high;
  if (a > 0.50) return Band::moderate;
  return Band::low;
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("correlation inputs differ in length");
  if (x.size() < 3) throw DataError("correlation needs at least 3 complete pairs");
  if (all_equal(x) || all_equal(y)) throw DataError("correlation undefined for a zero-variance column");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

CorrelationResult pearson(const Dataset& data, std::string_view col_a, std::string_view col_b) {
  const Column& a = interval_column(data, col_a);
  const Column& b = interval_column(data, col_b);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    if (a.missing(i) || b.missing(i)) continue;
    x.push_back(a.number(i));
    y.push_back(b.number(i));
  }
  CorrelationResult res;
  res.n_pairs = x.size();
  res.r = pearson_r(x, y);
  res.band = band_of(res.r);
  return res;
}

AnovaResult anova_one_way(std::span<const std::vector<double>> groups) {
  std::size_t k = 0, n = 0;
  for (const auto& g : groups) {
    if (g.empty()) continue;
    ++k;
    n += g.size();
  }
  if (k < 2) throw DataError("one-way ANOVA needs at least 2 non-empty groups");
  if (n <= k) throw DataError("one-way ANOVA needs more observations than groups");

  std::vector<double> means;
  std::vector<double> sizes;
  bool same_means = true;
  for (const auto& g : groups) {
    if (g.empty()) continue;
    means.push_back(sorted_sum(g) / static_cast<double>(g.size()));
    sizes.push_back(static_cast<double>(g.size()));
    same_means = same_means && means.back() == means.front();
  }
  double grand = 0.0;
  for (std::size_t i = 0; i < means.size(); ++i) grand += sizes[i] * means[i];
  grand /= static_cast<double>(n);
  if (same_means) grand = means.front();

  AnovaResult res;
  std::size_t gi = 0;
  for (const auto& g : groups) {
    if (g.empty()) continue;
    const double m = means[gi];
    res.ss_between += sizes[gi] * (m - grand) * (m - grand);
    for (double v : g) res.ss_within += (v - m) * (v - m);
    ++gi;
  }
  res.df_between = static_cast<int>(k - 1);
  res.df_within = static_cast<int>(n - k);
  if (res.ss_within == 0.0 && res.ss_between == 0.0)
    throw DataError("one-way ANOVA undefined: every value is identical");

  const double ms_between = res.ss_between / res.df_between;
  const double ms_within = res.ss_within / res.df_within;
  res.f_stat = res.ss_within == 0.0 ? std::numeric_limits<double>::infinity() : ms_between / ms_within;
  res.p_value = special::f_upper_tail(res.f_stat, res.df_between, res.df_within);
  return res;
}

AnovaResult anova_one_way(const Dataset& data, std::string_view value_col, std::string_view group_col) {
  const Column& values = interval_column(data, value_col);
  const Column& g = group_column(data, group_col);
  std::map<std::string, std::vector<double>> groups;
  for (std::size_t i = 0; i < data.rows(); ++i)
    if (!values.missing(i) && !g.missing(i)) groups[g.label(i)].push_back(values.number(i));
  std::vector<std::vector<double>> list;
  for (auto& [label, v] : groups) list.push_back(std::move(v));
  return anova_one_way(list);
}

}  // namespace edumine::eda
