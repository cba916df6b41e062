#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace nav2goal::csv {

inline constexpr const char* kVersionLine = "# nav2goal-csv v1";

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal form that round-trips to the same double.
std::string format_number(double v);
std::string format_number(long long v);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
};

/// Collects rows of a CSV document with the version comment and a header.
class Writer {
 public:
  explicit Writer(std::vector<std::string> columns);

  Writer& add(double v);
  Writer& add(long long v);
  Writer& add(int v) { return add(static_cast<long long>(v)); }
  Writer& add(std::size_t v) { return add(static_cast<long long>(v)); }
  Writer& add(const std::string& v);
  Writer& add(const char* v) { return add(std::string(v)); }
  void end_row();

  std::string str() const;
  void save(const std::filesystem::path& path) const;
  std::size_t rows() const { return rows_; }

 private:
  std::vector<std::string> columns_;
  std::vector<std::string> current_;
  std::string body_;
  std::size_t rows_ = 0;
};

Table parse(const std::string& text);
Table read(const std::filesystem::path& path);

}  // namespace nav2goal::csv
