#include "edumine/dataset.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <unordered_set>

namespace edumine {

namespace {

constexpr std::array<std::string_view, 4> kRoleNames = {"id", "input", "target", "ignored"};
constexpr std::array<std::string_view, 4> kLevelNames = {"interval", "ordinal", "nominal", "binary"};

}  // namespace

std::string_view to_string(Role role) { return kRoleNames[static_cast<std::size_t>(role)]; }
std::string_view to_string(Level level) { return kLevelNames[static_cast<std::size_t>(level)]; }

Role parse_role(std::string_view text) {
  for (std::size_t i = 0; i < kRoleNames.size(); ++i)
    if (kRoleNames[i] == text) return static_cast<Role>(i);
  throw SchemaError("unknown variable role '" + std::string(text) + "'");
}

Level parse_level(std::string_view text) {
  for (std::size_t i = 0; i < kLevelNames.size(); ++i)
    if (kLevelNames[i] == text) return static_cast<Level>(i);
  throw SchemaError("unknown measurement level '" + std::string(text) + "'");
}

Column Column::numeric(std::vector<double> values, std::vector<std::uint8_t> missing) {
  if (values.size() != missing.size()) throw DataError("column value/mask length mismatch");
  Column c;
  c.numeric_ = true;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) missing[i] = 1;
    if (missing[i]) values[i] = std::numeric_limits<double>::quiet_NaN();
  }
  c.numbers_ = std::move(values);
  c.missing_ = std::move(missing);
  return c;
}

Column Column::text(std::vector<std::string> values, std::vector<std::uint8_t> missing) {
  if (values.size() != missing.size()) throw DataError("column value/mask length mismatch");
  Column c;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (missing[i]) values[i].clear();
  c.labels_ = std::move(values);
  c.missing_ = std::move(missing);
  return c;
}

std::size_t Column::missing_count() const {
  std::size_t n = 0;
  for (auto m : missing_) n += m;
  return n;
}

std::string format_number(double value) {
  std::array<char, 32> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

std::string Column::format(std::size_t row) const {
  if (missing(row)) return {};
  if (!numeric_) return labels_[row];
  return format_number(numbers_[row]);
}

Column Column::take(std::span<const std::size_t> rows) const {
  std::vector<std::uint8_t> mask;
  mask.reserve(rows.size());
  for (auto r : rows) mask.push_back(missing_.at(r));
  if (numeric_) {
    std::vector<double> v;
    v.reserve(rows.size());
    for (auto r : rows) v.push_back(numbers_[r]);
    return numeric(std::move(v), std::move(mask));
  }
  std::vector<std::string> v;
  v.reserve(rows.size());
  for (auto r : rows) v.push_back(labels_[r]);
  return text(std::move(v), std::move(mask));
}

bool Column::operator==(const Column& other) const {
  if (numeric_ != other.numeric_ || missing_ != other.missing_) return false;
  if (!numeric_) return labels_ == other.labels_;
  for (std::size_t i = 0; i < numbers_.size(); ++i)
    if (!missing_[i] && numbers_[i] != other.numbers_[i]) return false;
  return true;
}

Dataset::Dataset(std::vector<VariableSpec> schema, std::vector<Column> columns)
    : schema_(std::move(schema)), columns_(std::move(columns)) {
  if (schema_.size() != columns_.size())
    throw SchemaError("schema has " + std::to_string(schema_.size()) + " variables but " +
                      std::to_string(columns_.size()) + " columns were supplied");
  std::unordered_set<std::string> names;
  std::size_t ids = 0;
  for (std::size_t j = 0; j < schema_.size(); ++j) {
    const auto& spec = schema_[j];
    if (spec.name.empty()) throw SchemaError("variable with empty name");
    if (!names.insert(spec.name).second) throw SchemaError("duplicate variable '" + spec.name + "'");
    if (spec.role == Role::id) {
      ++ids;
      id_index_ = j;
    }
    if (columns_[j].is_numeric() != spec.numeric())
      throw SchemaError("column '" + spec.name + "' storage does not match its level");
  }
  if (ids != 1)
    throw SchemaError("a dataset needs exactly one id variable, found " + std::to_string(ids));

  rows_ = columns_[id_index_].size();
  for (std::size_t j = 0; j < columns_.size(); ++j)
    if (columns_[j].size() != rows_)
      throw DataError("column '" + schema_[j].name + "' has " + std::to_string(columns_[j].size()) +
                      " rows, expected " + std::to_string(rows_));

  const Column& idc = columns_[id_index_];
  std::unordered_set<std::string_view> seen;
  for (std::size_t i = 0; i < rows_; ++i) {
    if (idc.missing(i) || idc.label(i).empty())
      throw DataError("id variable '" + schema_[id_index_].name + "' is missing at row " +
                      std::to_string(i + 1));
    if (!seen.insert(idc.label(i)).second) throw DataError("duplicate id '" + idc.label(i) + "'");
  }
}

Dataset Dataset::empty(std::vector<VariableSpec> schema) {
  std::vector<Column> cols;
  cols.reserve(schema.size());
  for (const auto& s : schema)
    cols.push_back(s.numeric() ? Column::numeric({}, {}) : Column::text({}, {}));
  return Dataset(std::move(schema), std::move(cols));
}

std::optional<std::size_t> Dataset::find(std::string_view name) const {
  for (std::size_t j = 0; j < schema_.size(); ++j)
    if (schema_[j].name == name) return j;
  return std::nullopt;
}

std::size_t Dataset::index_of(std::string_view name) const {
  if (auto j = find(name)) return *j;
  throw SchemaError("unknown variable '" + std::string(name) + "'");
}

Dataset Dataset::take_rows(std::span<const std::size_t> rows) const {
  std::vector<Column> cols;
  cols.reserve(columns_.size());
  for (const auto& c : columns_) cols.push_back(c.take(rows));
  return Dataset(schema_, std::move(cols));
}

Dataset Dataset::with_role(std::string_view name, Role role) const {
  const std::size_t j = index_of(name);
  if (role == Role::id || schema_[j].role == Role::id)
    throw SchemaError("cannot change the id role of '" + std::string(name) + "'");
  auto schema = schema_;
  schema[j].role = role;
  return Dataset(std::move(schema), columns_);
}

std::size_t Dataset::missing_count() const {
  std::size_t n = 0;
  for (const auto& c : columns_) n += c.missing_count();
  return n;
}

bool Dataset::operator==(const Dataset& other) const {
  return schema_ == other.schema_ && columns_ == other.columns_;
}

std::string fingerprint(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace edumine
