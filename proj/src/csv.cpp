#include "passage/csv.hpp"

#include <cstdio>

#include "passage/errors.hpp"

namespace passage {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& os, std::initializer_list<std::string_view> header)
    : os_(os), width_(header.size()) {
  bool first = true;
  for (auto h : header) {
    os_ << (first ? "" : ",") << h;
    first = false;
  }
  os_ << '\n';
}

CsvWriter::CsvWriter(std::ostream& os, const std::vector<std::string>& header) : os_(os), width_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
  os_ << '\n';
}

void CsvWriter::row(std::initializer_list<double> values) { row(std::vector<double>(values)); }

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != width_) throw ArgumentError("csv: row width does not match header");
  for (std::size_t i = 0; i < values.size(); ++i) os_ << (i ? "," : "") << format_double(values[i]);
  os_ << '\n';
}

void CsvWriter::row(std::string_view label, std::initializer_list<double> values) {
  if (values.size() + 1 != width_) throw ArgumentError("csv: row width does not match header");
  os_ << label;
  for (double v : values) os_ << ',' << format_double(v);
  os_ << '\n';
}

}  // namespace passage
