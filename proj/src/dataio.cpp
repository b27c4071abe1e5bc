#include "edumine/dataio.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "edumine/csv.hpp"
#include "edumine/random.hpp"

namespace edumine::dataio {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool parse_real(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

void open_for_write(std::ofstream& out, const std::filesystem::path& path) {
  out.open(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
}

}  // namespace

std::vector<VariableSpec> parse_schema(std::string_view text) {
  std::vector<VariableSpec> schema;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;

    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      parts.push_back(trim(line.substr(start, comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (parts.size() != 3)
      throw SchemaError("schema line " + std::to_string(line_no) +
                        ": expected name,role,level but found " + std::to_string(parts.size()) +
                        " fields");
    if (parts[0] == "name" && parts[1] == "role" && parts[2] == "level") continue;
    schema.push_back({std::string(parts[0]), parse_role(parts[1]), parse_level(parts[2])});
  }
  return schema;
}

std::vector<VariableSpec> load_schema(const std::filesystem::path& path) {
  return parse_schema(csv::read_text(path));
}

void write_schema(std::ostream& out, const std::vector<VariableSpec>& schema) {
  out << "name,role,level\n";
  for (const auto& v : schema) out << v.name << ',' << to_string(v.role) << ',' << to_string(v.level) << '\n';
}

void save_schema(const std::filesystem::path& path, const std::vector<VariableSpec>& schema) {
  std::ofstream out;
  open_for_write(out, path);
  write_schema(out, schema);
}

bool is_missing_token(std::string_view cell) {
  cell = trim(cell);
  return cell.empty() || cell == "NA" || cell == ".";
}

Dataset parse_table(std::string_view text, const std::vector<VariableSpec>& schema) {
  const csv::Table table = csv::parse(text);

  std::unordered_map<std::string, std::size_t> header_pos;
  for (std::size_t j = 0; j < table.header.size(); ++j)
    header_pos.emplace(std::string(trim(table.header[j])), j);

  std::vector<Column> columns;
  columns.reserve(schema.size());
  const std::size_t n = table.rows.size();
  for (const auto& spec : schema) {
    auto it = header_pos.find(spec.name);
    if (it == header_pos.end())
      throw SchemaError("variable '" + spec.name + "' is not in the file header");
    const std::size_t src = it->second;
    std::vector<std::uint8_t> missing(n, 0);
    if (spec.numeric()) {
      std::vector<double> values(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const auto& cell = table.rows[i][src];
        if (is_missing_token(cell) || !parse_real(cell, values[i])) missing[i] = 1;
      }
      columns.push_back(Column::numeric(std::move(values), std::move(missing)));
    } else {
      std::vector<std::string> values(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto& cell = table.rows[i][src];
        if (is_missing_token(cell))
          missing[i] = 1;
        else
          values[i] = std::string(trim(cell));
      }
      columns.push_back(Column::text(std::move(values), std::move(missing)));
    }
  }
  return Dataset(schema, std::move(columns));
}

Dataset load_table(const std::filesystem::path& path, const std::vector<VariableSpec>& schema) {
  try {
    return parse_table(csv::read_text(path), schema);
  } catch (const IoError&) {
    throw;
  } catch (const Error& e) {
    // Keep the error class, prefix the file for context.
    const std::string msg = path.string() + ": " + e.what();
    if (dynamic_cast<const SchemaError*>(&e)) throw SchemaError(msg);
    throw DataError(msg);
  }
}

void write_table(std::ostream& out, const Dataset& data) {
  std::vector<std::string> fields;
  for (const auto& s : data.schema()) fields.push_back(s.name);
  csv::write_row(out, fields);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    fields.clear();
    for (std::size_t j = 0; j < data.cols(); ++j) {
      std::string cell = data.column(j).format(i);
      // A label that reads as a missing token would not survive reloading.
      if (!data.column(j).missing(i) && is_missing_token(cell))
        throw DataError("label '" + cell + "' in '" + data.schema()[j].name +
                        "' collides with a missing-value token");
      fields.push_back(std::move(cell));
    }
    csv::write_row(out, fields);
  }
}

void save_table(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out;
  open_for_write(out, path);
  write_table(out, data);
}

Dataset merge_by_id(const Dataset& left, const Dataset& right) {
  const std::size_t right_id = right.id_index();

  std::vector<VariableSpec> schema = left.schema();
  std::vector<std::size_t> right_cols;
  for (std::size_t j = 0; j < right.cols(); ++j) {
    if (j == right_id) continue;
    const auto& spec = right.schema()[j];
    if (left.find(spec.name))
      throw SchemaError("variable '" + spec.name + "' exists on both sides of the merge");
    schema.push_back(spec);
    right_cols.push_back(j);
  }

  std::unordered_map<std::string_view, std::size_t> right_rows;
  for (std::size_t i = 0; i < right.rows(); ++i) right_rows.emplace(right.id(i), i);

  std::vector<std::size_t> lrows, rrows;
  for (std::size_t i = 0; i < left.rows(); ++i) {
    auto it = right_rows.find(left.id(i));
    if (it == right_rows.end()) continue;
    lrows.push_back(i);
    rrows.push_back(it->second);
  }

  std::vector<Column> columns;
  for (std::size_t j = 0; j < left.cols(); ++j) columns.push_back(left.column(j).take(lrows));
  for (auto j : right_cols) columns.push_back(right.column(j).take(rrows));
  return Dataset(std::move(schema), std::move(columns));
}

std::size_t train_size(std::size_t n, double train_fraction) {
  const double raw = std::floor(train_fraction * static_cast<double>(n) + 0.5);
  auto k = static_cast<std::size_t>(raw);
  if (k < 1) k = 1;
  if (k > n - 1) k = n - 1;
  return k;
}

Partition partition(const Dataset& data, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw DataError("train fraction must lie strictly between 0 and 1");
  if (data.rows() < 2) throw DataError("partition needs at least 2 rows");

  Rng rng(seed);
  auto order = rng.permutation(data.rows());
  const std::size_t k = train_size(data.rows(), train_fraction);
  std::vector<std::uint8_t> in_train(data.rows(), 0);
  for (std::size_t i = 0; i < k; ++i) in_train[order[i]] = 1;

  std::vector<std::size_t> train_rows, valid_rows;
  for (std::size_t i = 0; i < data.rows(); ++i) (in_train[i] ? train_rows : valid_rows).push_back(i);
  return {data.take_rows(train_rows), data.take_rows(valid_rows), seed, train_fraction};
}

Dataset complete_cases(const Dataset& data, std::span<const std::string> columns) {
  std::vector<std::size_t> idx;
  for (const auto& name : columns) idx.push_back(data.index_of(name));
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    bool ok = true;
    for (auto j : idx) ok = ok && !data.column(j).missing(i);
    if (ok) keep.push_back(i);
  }
  return data.take_rows(keep);
}

}  // namespace edumine::dataio
