#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace bergman {

/// Neumaier-compensated accumulator.
class CompensatedSum {
public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class CompensatedComplexSum {
public:
  void add(std::complex<double> z) {
    re_.add(z.real());
    im_.add(z.imag());
  }
  std::complex<double> value() const { return {re_.value(), im_.value()}; }

private:
  CompensatedSum re_;
  CompensatedSum im_;
};

/// Sums rows of a row-major table (rows x width) with a fixed pairwise tree over
/// the row index. The result depends only on the table, never on how the rows
/// were produced, so parallel producers reduce bit-identically.
template <typename T>
std::vector<T> pairwise_row_sum(std::span<const T> table, std::size_t rows, std::size_t width) {
  std::vector<T> out(width, T{});
  if (rows == 0) return out;
  std::vector<T> work(table.begin(), table.begin() + static_cast<std::ptrdiff_t>(rows * width));
  std::size_t live = rows;
  while (live > 1) {
    const std::size_t half = live / 2;
    for (std::size_t i = 0; i < half; ++i) {
      T* dst = work.data() + i * width;
      const T* a = work.data() + (2 * i) * width;
      const T* b = work.data() + (2 * i + 1) * width;
      for (std::size_t c = 0; c < width; ++c) dst[c] = a[c] + b[c];
    }
    if (live % 2) {
      std::copy_n(work.data() + (live - 1) * width, width, work.data() + half * width);
    }
    live = half + live % 2;
  }
  std::copy_n(work.data(), width, out.data());
  return out;
}

} // namespace bergman
