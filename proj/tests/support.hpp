#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "edumine/dataset.hpp"

namespace testing {

using edumine::Column;
using edumine::Dataset;
using edumine::Level;
using edumine::Role;
using edumine::VariableSpec;

// NaN marks a missing cell.
inline Column num(std::vector<double> v) {
  std::vector<std::uint8_t> mask(v.size(), 0);
  for (std::size_t i = 0; i < v.size(); ++i) mask[i] = std::isnan(v[i]);
  return Column::numeric(std::move(v), std::move(mask));
}

// Empty string marks a missing cell.
inline Column txt(std::vector<std::string> v) {
  std::vector<std::uint8_t> mask(v.size(), 0);
  for (std::size_t i = 0; i < v.size(); ++i) mask[i] = v[i].empty();
  return Column::text(std::move(v), std::move(mask));
}

inline std::vector<std::string> ids(std::size_t n, const std::string& prefix = "S") {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string digits = std::to_string(i + 1);
    out.push_back(prefix + std::string(digits.size() < 4 ? 4 - digits.size() : 0, '0') + digits);
  }
  return out;
}

struct Builder {
  std::vector<VariableSpec> schema;
  std::vector<Column> columns;

  explicit Builder(std::size_t n, const std::string& id = "id") {
    schema.push_back({id, Role::id, Level::nominal});
    columns.push_back(txt(ids(n)));
  }
  Builder& interval(const std::string& name, std::vector<double> v, Role role = Role::input) {
    schema.push_back({name, role, Level::interval});
    columns.push_back(num(std::move(v)));
    return *this;
  }
  Builder& categorical(const std::string& name, std::vector<std::string> v, Level level = Level::nominal,
                       Role role = Role::input) {
    schema.push_back({name, role, level});
    columns.push_back(txt(std::move(v)));
    return *this;
  }
  Dataset build() const { return Dataset(schema, columns); }
};

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("edumine_" + tag + "_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
