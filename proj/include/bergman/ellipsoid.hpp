#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace bergman {

using cplx = std::complex<double>;

/// Coordinates of a point of C^n.
using ComplexPoint = std::vector<cplx>;

/// Monomial exponent vector alpha (all entries non-negative).
class MultiIndex {
public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries);
  MultiIndex(std::initializer_list<int> entries);

  static MultiIndex zero(std::size_t n) { return MultiIndex(std::vector<int>(n, 0)); }

  std::size_t size() const { return entries_.size(); }
  int operator[](std::size_t k) const { return entries_[k]; }
  int degree() const;
  const std::vector<int>& entries() const { return entries_; }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

private:
  std::vector<int> entries_;
};

std::string to_string(const MultiIndex& alpha);

/// Generalized complex ellipsoid {z : sum_k |z_k|^{2 m_k} < 1}.
class EllipsoidSpec {
public:
  explicit EllipsoidSpec(std::vector<double> exponents);

  static EllipsoidSpec ball(std::size_t n) { return EllipsoidSpec(std::vector<double>(n, 1.0)); }

  std::size_t dim() const { return exponents_.size(); }
  const std::vector<double>& exponents() const { return exponents_; }
  double exponent(std::size_t k) const { return exponents_[k]; }

  bool is_ball() const;
  bool has_integer_exponents() const;

  /// The domain with every exponent multiplied by j (the source of the power covering z -> z^j).
  EllipsoidSpec scaled(double j) const;

  friend bool operator==(const EllipsoidSpec&, const EllipsoidSpec&) = default;

private:
  std::vector<double> exponents_;
};

std::string to_string(const EllipsoidSpec& spec);

/// sum_k |p_k|^{2 m_k}; p is a member of the domain iff the result is < 1.
double defect(const EllipsoidSpec& spec, std::span<const cplx> p);

bool contains(const EllipsoidSpec& spec, std::span<const cplx> p);

/// log of the squared L^2 norm of z^alpha over the domain:
///   n log(pi) - sum log m_k + sum lgamma((alpha_k+1)/m_k) - lgamma(1 + sum (alpha_k+1)/m_k).
double log_moment(const EllipsoidSpec& spec, const MultiIndex& alpha);

double volume(const EllipsoidSpec& spec);

/// Number of multi-indices of length n with degree <= cap, i.e. C(cap+n, n).
std::size_t index_count(std::size_t n, int cap);

/// Number of multi-indices of length n with degree exactly d.
std::size_t layer_count(std::size_t n, int d);

/// All alpha with |alpha| <= cap in graded-lexicographic order: by degree, then
/// lexicographically ascending within a degree, e.g. (0,0),(0,1),(1,0),(0,2),...
std::vector<MultiIndex> enumerate_indices(const EllipsoidSpec& spec, int cap);
std::vector<MultiIndex> enumerate_indices(std::size_t n, int cap);

/// Position of alpha in the graded-lexicographic enumeration.
std::size_t graded_lex_rank(const MultiIndex& alpha);

void require_dim(const EllipsoidSpec& spec, std::size_t got, const char* what);

} // namespace bergman
