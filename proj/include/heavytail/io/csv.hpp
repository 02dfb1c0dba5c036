#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "heavytail/errors.hpp"
#include "heavytail/time_series.hpp"

namespace heavytail::io {

/// Shortest-safe decimal form of a double: 17 significant digits, '.' as the
/// decimal point regardless of locale.
inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

/// Accumulates a CSV document in memory: comma separated, LF line endings.
class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header) { row_strings(header); }

  template <class... Cells>
  CsvWriter& row(const Cells&... cells) {
    bool first = true;
    ((emit(cells, first)), ...);
    out_ += '\n';
    return *this;
  }

  CsvWriter& row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ += ',';
      out_ += quote(cells[i]);
    }
    out_ += '\n';
    return *this;
  }

  [[nodiscard]] const std::string& str() const noexcept { return out_; }

 private:
  static std::string quote(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + '"';
  }

  template <class T>
  void emit(const T& v, bool& first) {
    if (!first) out_ += ',';
    first = false;
    if constexpr (std::is_same_v<T, bool>) {
      out_ += v ? "true" : "false";
    } else if constexpr (std::is_floating_point_v<T>) {
      out_ += format_real(static_cast<double>(v));
    } else if constexpr (std::is_integral_v<T>) {
      out_ += std::to_string(v);
    } else {
      out_ += quote(std::string_view(v));
    }
  }

  std::string out_;
};

/// Writes `content` to a sibling temporary file and renames it over `path`,
/// so readers never observe a partially written artifact.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot open " + tmp.string() + " for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw DataError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw DataError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.emplace_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.emplace_back(trim(cur));
  return cells;
}

inline std::optional<double> parse_real(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace detail

/// Reads one column of a CSV file as a TimeSeries.
///
/// The first row is treated as a header when its selected cell (or, with no
/// column given, any cell) is not a number. `column` may be a header name or
/// a 0-based index; empty selects the first column. Blank lines are ignored.
inline TimeSeries ingest_csv(const std::filesystem::path& path, std::string_view column = {}) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open input file " + path.string());

  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    rows.emplace_back(line_no, detail::split_csv_line(line));
  }
  if (rows.empty()) throw DataError(path.string() + ": file is empty");

  const auto& first = rows.front().second;
  bool header = false;
  for (const auto& c : first) header = header || !detail::parse_real(c).has_value();

  std::size_t col = 0;
  if (!column.empty()) {
    bool found = false;
    if (header) {
      for (std::size_t i = 0; i < first.size(); ++i) {
        if (first[i] == column) {
          col = i;
          found = true;
          break;
        }
      }
    }
    if (!found) {
      std::size_t idx = 0;
      const auto res = std::from_chars(column.data(), column.data() + column.size(), idx);
      if (res.ec != std::errc() || res.ptr != column.data() + column.size()) {
        throw DataError(path.string() + ": no column named '" + std::string(column) + "'");
      }
      col = idx;
    }
  }

  std::vector<double> values;
  values.reserve(rows.size());
  for (std::size_t r = header ? 1 : 0; r < rows.size(); ++r) {
    const auto& [no, cells] = rows[r];
    if (col >= cells.size()) {
      throw DataError(path.string() + ": row " + std::to_string(no) + " has no column " + std::to_string(col));
    }
    const auto v = detail::parse_real(cells[col]);
    if (!v) {
      throw DataError(path.string() + ": row " + std::to_string(no) + ": cannot parse '" + cells[col] + "' as a number");
    }
    if (!std::isfinite(*v)) {
      throw DataError(path.string() + ": row " + std::to_string(no) + ": non-finite value '" + cells[col] + "'");
    }
    values.push_back(*v);
  }
  if (values.empty()) throw DataError(path.string() + ": selected column is empty");
  return TimeSeries(std::move(values), path.string());
}

}  // namespace heavytail::io
