#include "msukf/csv.hpp"

#include <cstdio>

namespace msukf {

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void CsvWriter::separator() {
  if (row_started_) os_ << ',';
  row_started_ = true;
}

CsvWriter& CsvWriter::cell(std::string_view text) {
  separator();
  if (text.find_first_of(",\"\n") == std::string_view::npos) {
    os_ << text;
  } else {
    os_ << '"';
    for (char c : text) {
      if (c == '"') os_ << '"';
      os_ << c;
    }
    os_ << '"';
  }
  return *this;
}

CsvWriter& CsvWriter::cell(double value) {
  separator();
  os_ << format_real(value);
  return *this;
}

CsvWriter& CsvWriter::cell(long long value) {
  separator();
  os_ << value;
  return *this;
}

void CsvWriter::end_row() {
  os_ << '\n';
  row_started_ = false;
}

}  // namespace msukf
