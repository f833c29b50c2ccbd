#include "fwus/csv.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>

namespace fwus {

std::string format_number(double value) { return fmt::format("{}", value); }

CsvWriter& CsvWriter::field(std::string_view text) {
  if (!first_) out_ << ',';
  first_ = false;
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) {
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

// Missing values (NaN) are written as empty fields.
CsvWriter& CsvWriter::field(double value) { return field(std::isnan(value) ? std::string{} : format_number(value)); }
CsvWriter& CsvWriter::field(long long value) { return field(fmt::format("{}", value)); }
CsvWriter& CsvWriter::field(unsigned long long value) { return field(fmt::format("{}", value)); }

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (const auto& f : fields) field(std::string_view(f));
  end_row();
}

void CsvWriter::end_row() {
  out_ << '\n';
  first_ = true;
}

}  // namespace fwus
