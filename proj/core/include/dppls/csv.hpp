#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace dppls {

/// Shortest-safe decimal form: 17 significant digits, round-trips through
/// strtod bit-exactly. Infinities and NaN print as inf / -inf / nan.
std::string format_real(double v);

/// RFC 4180 rows with LF line endings.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  CsvWriter& header(const std::vector<std::string>& names);

  CsvWriter& field(std::string_view text);
  CsvWriter& field(double v);
  CsvWriter& field(std::uint64_t v);
  CsvWriter& field(std::int64_t v);
  CsvWriter& field(int v) { return field(static_cast<std::int64_t>(v)); }
  CsvWriter& field(const char* text) { return field(std::string_view(text)); }
  CsvWriter& field(const std::string& text) { return field(std::string_view(text)); }

  template <class T>
  CsvWriter& operator<<(const T& v) {
    return field(v);
  }

  void end_row();

 private:
  void separator();

  std::ostream& out_;
  bool row_open_ = false;
};

/// Splits one CSV line (no embedded newlines) into fields, undoing quoting.
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace dppls
