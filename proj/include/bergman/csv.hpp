#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

namespace bergman {

/// 17 significant digits, '.' decimal separator, locale independent.
std::string format_double(double x);

std::string format_complex(std::complex<double> z);

/// Minimal CSV writer: header row then data rows; fields are not quoted, so
/// callers keep commas out of text fields.
class CsvWriter {
public:
  CsvWriter(std::ostream& os, const std::vector<std::string>& header);

  CsvWriter& field(const std::string& text);
  CsvWriter& field(double x);
  CsvWriter& field(long long x);
  CsvWriter& field(int x) { return field(static_cast<long long>(x)); }
  CsvWriter& field(std::size_t x) { return field(static_cast<long long>(x)); }
  void end_row();

private:
  std::ostream& os_;
  std::size_t width_;
  std::size_t column_ = 0;
};

} // namespace bergman
