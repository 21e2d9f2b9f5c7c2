#include "bergman/csv.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace bergman {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_complex(std::complex<double> z) {
  std::string s = format_double(z.real());
  const double im = z.imag();
  if (std::signbit(im)) {
    s += format_double(im);
  } else {
    s += '+';
    s += format_double(im);
  }
  s += 'i';
  return s;
}

CsvWriter::CsvWriter(std::ostream& os, const std::vector<std::string>& header)
    : os_(os), width_(header.size()) {
  for (const auto& h : header) field(h);
  end_row();
}

CsvWriter& CsvWriter::field(const std::string& text) {
  if (column_ >= width_) throw std::logic_error("CsvWriter: too many fields in row");
  if (column_) os_ << ',';
  os_ << text;
  ++column_;
  return *this;
}

CsvWriter& CsvWriter::field(double x) { return field(format_double(x)); }

CsvWriter& CsvWriter::field(long long x) { return field(std::to_string(x)); }

void CsvWriter::end_row() {
  if (column_ != width_) throw std::logic_error("CsvWriter: short row");
  os_ << '\n';
  column_ = 0;
}

} // namespace bergman
