#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gaussmlc {

/// Decimal rendering with 17 significant digits; round-trips any double.
std::string fmt17(double x);

/// Comma-separated table with a header row, LF line endings, reals via fmt17.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void add_row(std::vector<std::string> cells);
  std::string str() const;
  void write(const std::string& path) const;

  static std::string cell(double x) { return fmt17(x); }
  static std::string cell(long long x) { return std::to_string(x); }
  static std::string cell(int x) { return std::to_string(x); }
  static std::string cell(std::uint64_t x) { return std::to_string(x); }
  static std::string cell(const std::string& s) { return s; }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace gaussmlc
