#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace edumine {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// Variable missing, duplicated, or of the wrong role/level.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Cell contents violate a contract (duplicate ids, too few rows, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

enum class Role { id, input, target, ignored };
enum class Level { interval, ordinal, nominal, binary };

std::string_view to_string(Role role);
std::string_view to_string(Level level);
Role parse_role(std::string_view text);
Level parse_level(std::string_view text);

struct VariableSpec {
  std::string name;
  Role role = Role::input;
  Level level = Level::interval;

  /// Interval non-id variables hold reals; everything else holds labels.
  bool numeric() const { return level == Level::interval && role != Role::id; }

  bool operator==(const VariableSpec&) const = default;
};

/// One typed column. Missing cells hold a canonical placeholder (NaN or the
/// empty label) so a cell is never both a value and missing.
class Column {
 public:
  static Column numeric(std::vector<double> values, std::vector<std::uint8_t> missing);
  static Column text(std::vector<std::string> values, std::vector<std::uint8_t> missing);

  bool is_numeric() const { return numeric_; }
  std::size_t size() const { return missing_.size(); }
  bool missing(std::size_t row) const { return missing_[row] != 0; }
  double number(std::size_t row) const { return numbers_[row]; }
  const std::string& label(std::size_t row) const { return labels_[row]; }
  std::size_t missing_count() const;

  /// Cell rendered for the delimited format; missing cells render empty.
  std::string format(std::size_t row) const;

  Column take(std::span<const std::size_t> rows) const;

  bool operator==(const Column& other) const;

 private:
  Column() = default;

  bool numeric_ = false;
  std::vector<double> numbers_;
  std::vector<std::string> labels_;
  std::vector<std::uint8_t> missing_;
};

/// Immutable rectangular table with exactly one id variable.
class Dataset {
 public:
  Dataset(std::vector<VariableSpec> schema, std::vector<Column> columns);

  /// Zero-row table with the given schema.
  static Dataset empty(std::vector<VariableSpec> schema);

  const std::vector<VariableSpec>& schema() const { return schema_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return schema_.size(); }

  const Column& column(std::size_t index) const { return columns_[index]; }
  const Column& column(std::string_view name) const { return columns_[index_of(name)]; }
  const VariableSpec& spec(std::string_view name) const { return schema_[index_of(name)]; }

  std::optional<std::size_t> find(std::string_view name) const;
  /// Throws SchemaError naming the variable when absent.
  std::size_t index_of(std::string_view name) const;

  std::size_t id_index() const { return id_index_; }
  const std::string& id(std::size_t row) const { return columns_[id_index_].label(row); }

  Dataset take_rows(std::span<const std::size_t> rows) const;
  Dataset with_role(std::string_view name, Role role) const;

  std::size_t missing_count() const;

  bool operator==(const Dataset& other) const;

 private:
  std::vector<VariableSpec> schema_;
  std::vector<Column> columns_;
  std::size_t rows_ = 0;
  std::size_t id_index_ = 0;
};

/// Stable 64-bit FNV-1a digest rendered as 16 hex digits.
std::string fingerprint(std::string_view text);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

}  // namespace edumine
