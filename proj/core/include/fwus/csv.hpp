#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace fwus {

// Minimal RFC-4180 writer; numbers use the shortest round-trip form.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  CsvWriter& field(std::string_view text);
  CsvWriter& field(double value);
  CsvWriter& field(long long value);
  CsvWriter& field(unsigned long long value);
  CsvWriter& field(int value) { return field(static_cast<long long>(value)); }
  CsvWriter& field(std::size_t value) { return field(static_cast<unsigned long long>(value)); }
  void row(const std::vector<std::string>& fields);
  void end_row();

 private:
  std::ostream& out_;
  bool first_ = true;
};

std::string format_number(double value);

}  // namespace fwus
