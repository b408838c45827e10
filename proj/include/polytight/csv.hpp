#pragma once

// Locale-independent CSV helpers: comma separator, '.' decimal point, LF.

#include <charconv>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace polytight {

/// Shortest representation that round-trips to the same double.
std::string format_number(double value);
std::string format_number(long long value);
inline std::string format_number(int value) {
  return format_number(static_cast<long long>(value));
}

double parse_double(std::string_view text);
long long parse_integer(std::string_view text);

std::vector<std::string_view> split_fields(std::string_view line);

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header);

  template <typename... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(fields), first = false), ...);
    out_ << '\n';
  }

 private:
  static std::string cell(double v) { return format_number(v); }
  static std::string cell(int v) { return format_number(v); }
  static std::string cell(long long v) { return format_number(v); }
  static std::string cell(long v) { return format_number(static_cast<long long>(v)); }
  static std::string cell(unsigned long v) { return std::to_string(v); }
  static std::string cell(std::string_view v) { return std::string(v); }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }

  std::ostream& out_;
};

}  // namespace polytight
