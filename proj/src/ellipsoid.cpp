#include "bergman/ellipsoid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "bergman/errors.hpp"

namespace bergman {

namespace {

// C(a, b) as size_t; small arguments only (table sizes).
std::size_t binomial(std::size_t a, std::size_t b) {
  if (b > a) return 0;
  b = std::min(b, a - b);
  std::size_t r = 1;
  for (std::size_t i = 1; i <= b; ++i) {
    r = r * (a - b + i) / i;
  }
  return r;
}

void append_layer(std::size_t n, int degree, std::vector<int>& scratch, std::size_t pos,
                  int remaining, std::vector<MultiIndex>& out) {
  if (pos + 1 == n) {
    scratch[pos] = remaining;
    out.emplace_back(scratch);
    return;
  }
  for (int v = 0; v <= remaining; ++v) {
    scratch[pos] = v;
    append_layer(n, degree, scratch, pos + 1, remaining - v, out);
  }
}

} // namespace

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
  for (int e : entries_) {
    if (e < 0) throw std::invalid_argument("MultiIndex entries must be non-negative");
  }
}

MultiIndex::MultiIndex(std::initializer_list<int> entries)
    : MultiIndex(std::vector<int>(entries)) {}

int MultiIndex::degree() const { return std::accumulate(entries_.begin(), entries_.end(), 0); }

std::string to_string(const MultiIndex& alpha) {
  std::ostringstream os;
  os << '(';
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    if (k) os << ',';
    os << alpha[k];
  }
  os << ')';
  return os.str();
}

EllipsoidSpec::EllipsoidSpec(std::vector<double> exponents) : exponents_(std::move(exponents)) {
  if (exponents_.empty()) throw std::invalid_argument("EllipsoidSpec needs dim >= 1");
  for (double m : exponents_) {
    if (!(m > 0.0) || !std::isfinite(m)) {
      throw std::invalid_argument("EllipsoidSpec exponents must be finite and > 0");
    }
  }
}

bool EllipsoidSpec::is_ball() const {
  return std::all_of(exponents_.begin(), exponents_.end(), [](double m) { return m == 1.0; });
}

bool EllipsoidSpec::has_integer_exponents() const {
  return std::all_of(exponents_.begin(), exponents_.end(),
                     [](double m) { return m == std::round(m); });
}

EllipsoidSpec EllipsoidSpec::scaled(double j) const {
  std::vector<double> m = exponents_;
  for (double& v : m) v *= j;
  return EllipsoidSpec(std::move(m));
}

std::string to_string(const EllipsoidSpec& spec) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t k = 0; k < spec.dim(); ++k) {
    if (k) os << ',';
    os << spec.exponent(k);
  }
  return os.str();
}

void require_dim(const EllipsoidSpec& spec, std::size_t got, const char* what) {
  if (got != spec.dim()) {
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(spec.dim()) +
                         ", got " + std::to_string(got));
  }
}

double defect(const EllipsoidSpec& spec, std::span<const cplx> p) {
  require_dim(spec, p.size(), "defect");
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    s += std::pow(std::norm(p[k]), spec.exponent(k));
  }
  return s;
}

bool contains(const EllipsoidSpec& spec, std::span<const cplx> p) { return defect(spec, p) < 1.0; }

double log_moment(const EllipsoidSpec& spec, const MultiIndex& alpha) {
  require_dim(spec, alpha.size(), "log_moment");
  const auto n = static_cast<double>(spec.dim());
  double total = n * std::log(std::numbers::pi);
  double p_sum = 0.0;
  for (std::size_t k = 0; k < spec.dim(); ++k) {
    const double p = (alpha[k] + 1.0) / spec.exponent(k);
    total += std::lgamma(p) - std::log(spec.exponent(k));
    p_sum += p;
  }
  return total - std::lgamma(1.0 + p_sum);
}

double volume(const EllipsoidSpec& spec) {
  return std::exp(log_moment(spec, MultiIndex::zero(spec.dim())));
}

std::size_t index_count(std::size_t n, int cap) {
  if (cap < 0) return 0;
  return binomial(static_cast<std::size_t>(cap) + n, n);
}

std::size_t layer_count(std::size_t n, int d) {
  if (d < 0) return 0;
  return binomial(static_cast<std::size_t>(d) + n - 1, n - 1);
}

std::vector<MultiIndex> enumerate_indices(std::size_t n, int cap) {
  if (n == 0) throw std::invalid_argument("enumerate_indices: n must be >= 1");
  std::vector<MultiIndex> out;
  if (cap < 0) return out;
  out.reserve(index_count(n, cap));
  std::vector<int> scratch(n, 0);
  for (int d = 0; d <= cap; ++d) {
    append_layer(n, d, scratch, 0, d, out);
  }
  return out;
}

std::vector<MultiIndex> enumerate_indices(const EllipsoidSpec& spec, int cap) {
  return enumerate_indices(spec.dim(), cap);
}

std::size_t graded_lex_rank(const MultiIndex& alpha) {
  const std::size_t n = alpha.size();
  const int d = alpha.degree();
  std::size_t rank = index_count(n, d - 1);
  int remaining = d;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    // Indices that agree before position k and are smaller at k.
    for (int v = 0; v < alpha[k]; ++v) {
      rank += layer_count(n - k - 1, remaining - v);
    }
    remaining -= alpha[k];
  }
  return rank;
}

} // namespace bergman
