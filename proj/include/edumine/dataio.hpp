#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edumine/dataset.hpp"

namespace edumine::dataio {

/// Schema text: one `name,role,level` line per variable. Blank lines, lines
/// starting with '#', and a literal `name,role,level` header are skipped.
std::vector<VariableSpec> parse_schema(std::string_view text);
std::vector<VariableSpec> load_schema(const std::filesystem::path& path);
void write_schema(std::ostream& out, const std::vector<VariableSpec>& schema);
void save_schema(const std::filesystem::path& path, const std::vector<VariableSpec>& schema);

/// "", "NA" and "." (after trimming) denote a missing cell.
bool is_missing_token(std::string_view cell);

/// Columns are ordered as in `schema`; header columns not named there are
/// ignored. Unparseable interval cells become missing.
Dataset parse_table(std::string_view text, const std::vector<VariableSpec>& schema);
Dataset load_table(const std::filesystem::path& path, const std::vector<VariableSpec>& schema);

void write_table(std::ostream& out, const Dataset& data);
void save_table(const std::filesystem::path& path, const Dataset& data);

/// Inner join on the id variables. Left's columns come first, then right's
/// non-id columns; row order follows left.
Dataset merge_by_id(const Dataset& left, const Dataset& right);

struct Partition {
  Dataset train;
  Dataset validation;
  std::uint64_t seed = 0;
  double train_fraction = 0.0;
};

/// Number of training rows for `n` rows: round-half-up of fraction * n,
/// clamped to [1, n-1].
std::size_t train_size(std::size_t n, double train_fraction);

/// Seeded shuffle of row indices, prefix taken as training. Both halves keep
/// the source row order.
Partition partition(const Dataset& data, double train_fraction, std::uint64_t seed);

/// Rows with no missing cell in any of `columns`, order preserved.
Dataset complete_cases(const Dataset& data, std::span<const std::string> columns);

}  // namespace edumine::dataio
