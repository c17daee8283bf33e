#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace benignlab {

// Decimal with 17 significant digits, enough to round-trip a double.
std::string format_real(double x);

// Minimal CSV table: a header row and string cells. No quoting; every field
// this project writes is numeric or a bare identifier.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;
  double real(std::size_t row, std::string_view name) const;
  long long integer(std::size_t row, std::string_view name) const;
  const std::string& cell(std::size_t row, std::string_view name) const;
};

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

}  // namespace benignlab
