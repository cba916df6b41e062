#include "nav2goal/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nav2goal/io_util.hpp"

namespace nav2goal::csv {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_number(long long v) { return std::to_string(v); }

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw CsvError("no column named " + name);
}

double Table::number(std::size_t row, const std::string& name) const {
  const auto& cell = rows.at(row).at(column(name));
  double v = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
    throw CsvError("not a number in column " + name + ": '" + cell + "'");
  }
  return v;
}

Writer::Writer(std::vector<std::string> columns) : columns_(std::move(columns)) {}

Writer& Writer::add(double v) {
  current_.push_back(format_number(v));
  return *this;
}

Writer& Writer::add(long long v) {
  current_.push_back(format_number(v));
  return *this;
}

Writer& Writer::add(const std::string& v) {
  if (v.find_first_of(",\n\"") != std::string::npos) throw CsvError("csv cell needs quoting: " + v);
  current_.push_back(v);
  return *this;
}

void Writer::end_row() {
  if (current_.size() != columns_.size()) {
    throw CsvError("row has " + std::to_string(current_.size()) + " cells, expected " +
                   std::to_string(columns_.size()));
  }
  for (std::size_t i = 0; i < current_.size(); ++i) {
    if (i) body_ += ',';
    body_ += current_[i];
  }
  body_ += '\n';
  current_.clear();
  ++rows_;
}

std::string Writer::str() const {
  std::string out = std::string(kVersionLine) + "\n";
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i) out += ',';
    out += columns_[i];
  }
  out += '\n';
  return out + body_;
}

void Writer::save(const std::filesystem::path& path) const { io::write_text_atomic(path, str()); }

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

Table parse(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kVersionLine) throw CsvError("missing csv version line");
  if (!std::getline(in, line)) throw CsvError("missing csv header");
  Table t;
  t.columns = split_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto row = split_line(line);
    if (row.size() != t.columns.size()) throw CsvError("ragged csv row: " + line);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

}  // namespace nav2goal::csv
