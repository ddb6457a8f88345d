#pragma once

#include <ostream>
#include <string>
#include <string_view>

namespace msukf {

/// Minimal comma-separated writer. Reals are printed with 17 significant
/// digits so that values round-trip exactly.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  CsvWriter& cell(std::string_view text);
  CsvWriter& cell(const char* text) { return cell(std::string_view(text)); }
  CsvWriter& cell(const std::string& text) { return cell(std::string_view(text)); }
  CsvWriter& cell(double value);
  CsvWriter& cell(long long value);
  CsvWriter& cell(int value) { return cell(static_cast<long long>(value)); }
  void end_row();

 private:
  void separator();

  std::ostream& os_;
  bool row_started_{false};
};

/// "%.17g"
[[nodiscard]] std::string format_real(double value);

}  // namespace msukf
