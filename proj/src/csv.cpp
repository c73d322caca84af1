#include "trilin/csv.hpp"

#include <charconv>
#include <sstream>

#include "trilin/errors.hpp"

namespace trilin::csv {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::string format_cell(const Cell& cell) {
  if (const double* d = std::get_if<double>(&cell)) return format_double(*d);
  if (const std::int64_t* i = std::get_if<std::int64_t>(&cell))
    return std::to_string(*i);
  return std::get<std::string>(cell);
}

}  // namespace

Writer::Writer(std::filesystem::path path, const std::string& manifest_name,
               const std::vector<std::string>& columns)
    : path_(std::move(path)), tmp_(path_), columns_(columns.size()) {
  tmp_ += ".tmp";
  out_.open(tmp_, std::ios::binary | std::ios::trunc);
  if (!out_) throw ConfigError("cannot open for writing: " + tmp_.string());
  out_ << "# manifest: " << manifest_name << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i)
    out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
}

Writer::~Writer() {
  if (!committed_) {
    out_.close();
    std::error_code ec;
    std::filesystem::remove(tmp_, ec);
  }
}

void Writer::row(const std::vector<Cell>& cells) {
  if (cells.size() != columns_)
    throw ConfigError("csv row width does not match the header");
  for (std::size_t i = 0; i < cells.size(); ++i)
    out_ << format_cell(cells[i]) << (i + 1 < cells.size() ? "," : "\n");
}

void Writer::commit() {
  out_.flush();
  if (!out_) throw ConfigError("write failed: " + tmp_.string());
  out_.close();
  std::filesystem::rename(tmp_, path_);
  committed_ = true;
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw ConfigError("csv: missing required column '" + name + "'");
}

Table read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read: " + path.string());

  Table table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!have_header) {
      table.columns = std::move(cells);
      have_header = true;
    } else {
      if (cells.size() != table.columns.size())
        throw ConfigError("csv: ragged row in " + path.string());
      table.rows.push_back(std::move(cells));
    }
  }
  if (!have_header) throw ConfigError("csv: no header row in " + path.string());
  return table;
}

double parse_double(const std::string& cell) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last)
    throw ConfigError("csv: not a number: '" + cell + "'");
  return v;
}

}  // namespace trilin::csv
