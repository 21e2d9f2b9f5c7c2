#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "bergman/ellipsoid.hpp"

namespace bergman {

struct SeriesBudget {
  std::size_t max_coefficients = std::size_t{1} << 24;
};

/// Truncated Reinhardt power series K(z, w) = sum_{|alpha| <= cap} c_alpha z^alpha conj(w)^alpha
/// with c_alpha = 1 / ||z^alpha||^2, stored as log c_alpha in graded-lex order.
class KernelSeries {
public:
  const EllipsoidSpec& spec() const { return spec_; }
  int cap() const { return cap_; }
  std::size_t size() const { return log_coeffs_.size(); }

  std::span<const double> log_coeffs() const { return log_coeffs_; }
  /// Flat index table, size() rows of spec().dim() entries.
  std::span<const int> flat_indices() const { return indices_; }
  /// Row range [layer_begin(d), layer_begin(d+1)) holds the degree-d indices.
  std::size_t layer_begin(int d) const { return layer_offsets_[static_cast<std::size_t>(d)]; }

  MultiIndex index(std::size_t row) const;
  double log_coeff(const MultiIndex& alpha) const;
  /// Signed coefficient value (genuine kernels are strictly positive).
  double coeff(const MultiIndex& alpha) const;
  int sign(std::size_t row) const { return signs_.empty() ? 1 : signs_[row]; }
  bool has_signs() const { return !signs_.empty(); }

  /// Copy with the sign of one coefficient reversed. Used to build validation
  /// series with known zeros; the result is no longer a Bergman kernel.
  KernelSeries with_flipped_sign(const MultiIndex& alpha) const;

  friend KernelSeries build_series(const EllipsoidSpec&, int, const SeriesBudget&);

private:
  KernelSeries(EllipsoidSpec spec, int cap) : spec_(std::move(spec)), cap_(cap) {}

  EllipsoidSpec spec_;
  int cap_;
  std::vector<double> log_coeffs_;
  std::vector<int> indices_;
  std::vector<std::size_t> layer_offsets_;
  std::vector<std::int8_t> signs_;
};

KernelSeries build_series(const EllipsoidSpec& spec, int cap, const SeriesBudget& budget = {});

struct EvalResult {
  cplx value{};
  /// Bound on the magnitude of the omitted terms (ratio-test estimate).
  double tail_bound = 0.0;
  /// Floating-point error estimate for the retained terms.
  double rounding_bound = 0.0;
  /// false when t lies outside the convergence region or the tail ratio test fails.
  bool valid = true;

  double error_bound() const { return tail_bound + rounding_bound; }
};

struct TailEstimate {
  double bound = 0.0;
  double ratio = 0.0;
  bool valid = true;
};

/// Kernel as a function of t_k = z_k conj(w_k).
EvalResult eval_reinhardt(const KernelSeries& series, std::span<const cplx> t);

EvalResult eval_kernel(const KernelSeries& series, std::span<const cplx> z, std::span<const cplx> w);

/// Upper bound for sum_{|alpha| > cap} |c_alpha| rho^alpha: the largest layer-sum ratio
/// over the last three degrees, r, bounds the tail by S_cap r / (1 - r).
TailEstimate tail_estimate(const KernelSeries& series, std::span<const double> rho);

/// sum_k rho_k^{m_k} for moduli rho; the series converges where this is < 1.
double moduli_level(const EllipsoidSpec& spec, std::span<const double> rho);

struct AdaptiveSeries {
  KernelSeries series;
  TailEstimate tail;
  bool converged = false;
};

/// Doubles cap from start_cap until the tail at rho drops below rel_tol times the
/// diagonal value sum c_alpha rho^alpha, or max_cap / the budget is reached.
AdaptiveSeries build_series_for_tolerance(const EllipsoidSpec& spec, std::span<const double> rho,
                                          double rel_tol, int start_cap = 16, int max_cap = 512,
                                          const SeriesBudget& budget = {});

/// n!/pi^n (1 - <z,w>)^{-(n+1)}, <z,w> = sum z_k conj(w_k).
cplx ball_kernel_closed(std::span<const cplx> z, std::span<const cplx> w, std::size_t n);

/// prod_k (1/pi) (1 - z_k conj(w_k))^{-2}.
cplx polydisc_kernel_closed(std::span<const cplx> z, std::span<const cplx> w);

/// Uniform interface over series and closed-form kernels.
using KernelEvaluator = std::function<EvalResult(std::span<const cplx>, std::span<const cplx>)>;

KernelEvaluator series_evaluator(KernelSeries series);
KernelEvaluator ball_evaluator(std::size_t n);
KernelEvaluator polydisc_evaluator();

/// Closed form where one is known: any n = 1 domain (the unit disc) and the ball.
std::optional<KernelEvaluator> closed_form_evaluator(const EllipsoidSpec& spec);

/// Coefficient table as CSV: alpha_1..alpha_n,log_coeff in graded-lex row order.
void write_coefficients_csv(const KernelSeries& series, std::ostream& os);

} // namespace bergman
