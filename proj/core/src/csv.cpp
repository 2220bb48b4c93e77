#include "dppls/csv.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace dppls {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void CsvWriter::separator() {
  if (row_open_) out_ << ',';
  row_open_ = true;
}

CsvWriter& CsvWriter::header(const std::vector<std::string>& names) {
  for (const auto& n : names) field(n);
  end_row();
  return *this;
}

CsvWriter& CsvWriter::field(std::string_view text) {
  separator();
  const bool quote = text.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!quote) {
    out_ << text;
    return *this;
  }
  out_ << '"';
  for (char c : text) {
    if (c == '"') out_ << '"';
    out_ << c;
  }
  out_ << '"';
  return *this;
}

CsvWriter& CsvWriter::field(double v) {
  separator();
  out_ << format_real(v);
  return *this;
}

CsvWriter& CsvWriter::field(std::uint64_t v) {
  separator();
  out_ << v;
  return *this;
}

CsvWriter& CsvWriter::field(std::int64_t v) {
  separator();
  out_ << v;
  return *this;
}

void CsvWriter::end_row() {
  out_ << '\n';
  row_open_ = false;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

}  // namespace dppls
