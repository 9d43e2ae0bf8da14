#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace passage {

// 17 significant digits: doubles round-trip exactly.
std::string format_double(double v);

class CsvWriter {
 public:
  CsvWriter(std::ostream& os, std::initializer_list<std::string_view> header);
  CsvWriter(std::ostream& os, const std::vector<std::string>& header);

  void row(std::initializer_list<double> values);
  void row(const std::vector<double>& values);
  // Free-form row, e.g. a name followed by numbers.
  void row(std::string_view label, std::initializer_list<double> values);

 private:
  std::ostream& os_;
  std::size_t width_;
};

}  // namespace passage
