#include "benignlab/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace benignlab {

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::size_t CsvTable::column(std::string_view name) const {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw CsvError("missing CSV column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - header.begin());
}

const std::string& CsvTable::cell(std::size_t row, std::string_view name) const {
  const auto& r = rows.at(row);
  const std::size_t c = column(name);
  if (c >= r.size()) throw CsvError("short CSV row " + std::to_string(row));
  return r[c];
}

double CsvTable::real(std::size_t row, std::string_view name) const {
  const std::string& s = cell(row, name);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw CsvError("bad real '" + s + "' in column " + std::string(name));
  }
}

long long CsvTable::integer(std::size_t row, std::string_view name) const {
  const std::string& s = cell(row, name);
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw CsvError("bad integer '" + s + "' in column " + std::string(name));
  }
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw CsvError("empty CSV " + path.string());
  t.header = split_line(line);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    t.rows.push_back(split_line(line));
  }
  return t;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) throw CsvError("cannot write " + path.string());
  auto emit = [&out](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out << ',';
      out << r[i];
    }
    out << '\n';
  };
  emit(table.header);
  for (const auto& r : table.rows) emit(r);
}

}  // namespace benignlab
