#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

namespace trilin::csv {

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

using Cell = std::variant<double, std::int64_t, std::string>;

// Writes rows to <path>.tmp and renames into place on commit, so a failed
// run never leaves a partial file. The first line references the manifest
// that describes the run; readers treat '#' lines as comments.
class Writer {
 public:
  Writer(std::filesystem::path path, const std::string& manifest_name,
         const std::vector<std::string>& columns);
  Writer(const Writer&) = delete;
  Writer& operator=(const Writer&) = delete;
  ~Writer();

  void row(const std::vector<Cell>& cells);
  void commit();
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_, tmp_;
  std::ofstream out_;
  std::size_t columns_;
  bool committed_ = false;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  // Column lookup by header name; throws ConfigError when absent.
  std::size_t column(const std::string& name) const;
};

// Parses a CSV with a header row, skipping '#' comment lines. No quoting:
// this format never emits commas inside cells.
Table read(const std::filesystem::path& path);

// Strict double parse of a whole cell; throws ConfigError otherwise.
double parse_double(const std::string& cell);

}  // namespace trilin::csv
