#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace edumine::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// RFC 4180 style: comma separated, double-quoted fields may contain commas,
// newlines and doubled quotes. CRLF line endings and a UTF-8 BOM are accepted.
Table parse(std::string_view text);
Table read(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);

std::string escape(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace edumine::csv
