#include "bergman/kernel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "bergman/csv.hpp"
#include "bergman/errors.hpp"
#include "bergman/summation.hpp"

namespace bergman {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInf = std::numeric_limits<double>::infinity();

struct LayerPass {
  cplx value{};
  std::vector<double> abs_layers;
  double rounding = 0.0;
};

// One pass over the table in graded-lex order. Each term is
// sign * exp(log c_alpha + sum_k alpha_k log|t_k|) * prod_k e^{i alpha_k arg t_k}.
LayerPass accumulate(const KernelSeries& series, std::span<const cplx> t) {
  const std::size_t n = series.spec().dim();
  const int cap = series.cap();
  const auto width = static_cast<std::size_t>(cap) + 1;

  std::vector<double> log_pow(n * width);
  std::vector<double> err_pow(n * width);
  std::vector<cplx> phase(n * width);
  for (std::size_t k = 0; k < n; ++k) {
    const double modulus = std::abs(t[k]);
    const double log_mod = modulus > 0.0 ? std::log(modulus) : -kInf;
    const double arg = modulus > 0.0 ? std::arg(t[k]) : 0.0;
    for (std::size_t a = 0; a < width; ++a) {
      const double ad = static_cast<double>(a);
      log_pow[k * width + a] = a == 0 ? 0.0 : ad * log_mod;
      err_pow[k * width + a] = a == 0 ? 0.0 : ad * ((modulus > 0.0 ? std::abs(log_mod) : 0.0) + std::abs(arg));
      phase[k * width + a] = a == 0 ? cplx{1.0, 0.0} : std::polar(1.0, ad * arg);
    }
  }

  const auto log_c = series.log_coeffs();
  const auto idx = series.flat_indices();

  LayerPass pass;
  pass.abs_layers.assign(width, 0.0);
  CompensatedComplexSum total;
  double rounding = 0.0;
  for (int d = 0; d <= cap; ++d) {
    CompensatedComplexSum layer;
    CompensatedSum abs_layer;
    for (std::size_t row = series.layer_begin(d); row < series.layer_begin(d + 1); ++row) {
      const int* alpha = idx.data() + row * n;
      double x = log_c[row];
      double rel = 4.0 + static_cast<double>(n) + std::abs(log_c[row]);
      cplx ph{1.0, 0.0};
      for (std::size_t k = 0; k < n; ++k) {
        const auto a = static_cast<std::size_t>(alpha[k]);
        x += log_pow[k * width + a];
        rel += err_pow[k * width + a];
        ph *= phase[k * width + a];
      }
      const double mag = std::exp(x);
      if (mag == 0.0) continue;
      layer.add(static_cast<double>(series.sign(row)) * mag * ph);
      abs_layer.add(mag);
      rounding += mag * rel * kEps;
    }
    pass.abs_layers[static_cast<std::size_t>(d)] = abs_layer.value();
    total.add(layer.value());
  }
  pass.value = total.value();
  pass.rounding = rounding + 2.0 * kEps * std::abs(pass.value);
  return pass;
}

TailEstimate tail_from_layers(const std::vector<double>& layers) {
  const int cap = static_cast<int>(layers.size()) - 1;
  bool higher_nonzero = false;
  for (int d = 1; d <= cap; ++d) higher_nonzero = higher_nonzero || layers[d] > 0.0;
  if (!higher_nonzero) {
    // All moduli zero: only the constant term survives at every degree.
    return {0.0, 0.0, true};
  }
  if (cap < 1) return {kInf, kInf, false};
  double ratio = 0.0;
  for (int d = std::max(1, cap - 2); d <= cap; ++d) {
    if (layers[d - 1] <= 0.0) return {kInf, kInf, false};
    ratio = std::max(ratio, layers[d] / layers[d - 1]);
  }
  if (!(ratio < 1.0)) return {kInf, ratio, false};
  return {layers[cap] * ratio / (1.0 - ratio), ratio, true};
}

} // namespace

MultiIndex KernelSeries::index(std::size_t row) const {
  const std::size_t n = spec_.dim();
  return MultiIndex(std::vector<int>(indices_.begin() + static_cast<std::ptrdiff_t>(row * n),
                                     indices_.begin() + static_cast<std::ptrdiff_t>((row + 1) * n)));
}

double KernelSeries::log_coeff(const MultiIndex& alpha) const {
  require_dim(spec_, alpha.size(), "KernelSeries::log_coeff");
  if (alpha.degree() > cap_) throw std::out_of_range("KernelSeries: index above cap");
  return log_coeffs_[graded_lex_rank(alpha)];
}

double KernelSeries::coeff(const MultiIndex& alpha) const {
  const std::size_t row = graded_lex_rank(alpha);
  return sign(row) * std::exp(log_coeff(alpha));
}

KernelSeries KernelSeries::with_flipped_sign(const MultiIndex& alpha) const {
  require_dim(spec_, alpha.size(), "KernelSeries::with_flipped_sign");
  if (alpha.degree() > cap_) throw std::out_of_range("KernelSeries: index above cap");
  KernelSeries out = *this;
  if (out.signs_.empty()) out.signs_.assign(out.log_coeffs_.size(), 1);
  auto& s = out.signs_[graded_lex_rank(alpha)];
  s = static_cast<std::int8_t>(-s);
  return out;
}

KernelSeries build_series(const EllipsoidSpec& spec, int cap, const SeriesBudget& budget) {
  if (cap < 0) throw std::invalid_argument("build_series: cap must be >= 0");
  const std::size_t n = spec.dim();
  const std::size_t count = index_count(n, cap);
  if (count > budget.max_coefficients) {
    throw ResourceError("build_series: " + std::to_string(count) + " coefficients exceed budget of " +
                        std::to_string(budget.max_coefficients));
  }
  KernelSeries s(spec, cap);
  const auto indices = enumerate_indices(spec, cap);
  s.log_coeffs_.reserve(count);
  s.indices_.reserve(count * n);
  s.layer_offsets_.assign(static_cast<std::size_t>(cap) + 2, 0);
  for (std::size_t row = 0; row < indices.size(); ++row) {
    const auto& alpha = indices[row];
    s.log_coeffs_.push_back(-log_moment(spec, alpha));
    s.indices_.insert(s.indices_.end(), alpha.entries().begin(), alpha.entries().end());
  }
  for (int d = 0; d <= cap + 1; ++d) {
    s.layer_offsets_[static_cast<std::size_t>(d)] = index_count(n, d - 1);
  }
  return s;
}

double moduli_level(const EllipsoidSpec& spec, std::span<const double> rho) {
  require_dim(spec, rho.size(), "moduli_level");
  double s = 0.0;
  for (std::size_t k = 0; k < rho.size(); ++k) s += std::pow(rho[k], spec.exponent(k));
  return s;
}

EvalResult eval_reinhardt(const KernelSeries& series, std::span<const cplx> t) {
  require_dim(series.spec(), t.size(), "eval_reinhardt");
  std::vector<double> rho(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) rho[k] = std::abs(t[k]);
  const bool inside = moduli_level(series.spec(), rho) < 1.0;

  const LayerPass pass = accumulate(series, t);
  const TailEstimate tail = tail_from_layers(pass.abs_layers);
  EvalResult r;
  r.value = pass.value;
  r.tail_bound = tail.bound;
  r.rounding_bound = pass.rounding;
  r.valid = inside && tail.valid;
  return r;
}

EvalResult eval_kernel(const KernelSeries& series, std::span<const cplx> z, std::span<const cplx> w) {
  const auto& spec = series.spec();
  require_dim(spec, z.size(), "eval_kernel z");
  require_dim(spec, w.size(), "eval_kernel w");
  if (!contains(spec, z) || !contains(spec, w)) {
    throw DomainError("eval_kernel: points must lie strictly inside the domain");
  }
  std::vector<cplx> t(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) t[k] = z[k] * std::conj(w[k]);
  return eval_reinhardt(series, t);
}

TailEstimate tail_estimate(const KernelSeries& series, std::span<const double> rho) {
  require_dim(series.spec(), rho.size(), "tail_estimate");
  std::vector<cplx> t(rho.size());
  for (std::size_t k = 0; k < rho.size(); ++k) {
    if (rho[k] < 0.0) throw std::invalid_argument("tail_estimate: moduli must be non-negative");
    t[k] = rho[k];
  }
  TailEstimate tail = tail_from_layers(accumulate(series, t).abs_layers);
  if (!(moduli_level(series.spec(), rho) < 1.0)) tail.valid = false;
  return tail;
}

AdaptiveSeries build_series_for_tolerance(const EllipsoidSpec& spec, std::span<const double> rho,
                                          double rel_tol, int start_cap, int max_cap,
                                          const SeriesBudget& budget) {
  int cap = std::max(1, start_cap);
  std::vector<cplx> t(rho.begin(), rho.end());
  for (;;) {
    KernelSeries series = build_series(spec, cap, budget);
    const LayerPass pass = accumulate(series, t);
    TailEstimate tail = tail_from_layers(pass.abs_layers);
    if (!(moduli_level(spec, rho) < 1.0)) tail.valid = false;
    const bool ok = tail.valid && tail.bound <= rel_tol * std::abs(pass.value);
    const int next = cap * 2;
    if (ok || next > max_cap || index_count(spec.dim(), next) > budget.max_coefficients) {
      return AdaptiveSeries{std::move(series), tail, ok};
    }
    cap = next;
  }
}

cplx ball_kernel_closed(std::span<const cplx> z, std::span<const cplx> w, std::size_t n) {
  if (z.size() != n || w.size() != n) throw DimensionError("ball_kernel_closed: dimension mismatch");
  cplx inner{};
  for (std::size_t k = 0; k < n; ++k) inner += z[k] * std::conj(w[k]);
  const cplx base = 1.0 - inner;
  if (std::abs(inner) >= 1.0 || base == cplx{}) {
    throw SingularInputError("ball_kernel_closed: requires |<z,w>| < 1");
  }
  double factor = 1.0;
  for (std::size_t k = 2; k <= n; ++k) factor *= static_cast<double>(k);
  factor /= std::pow(std::numbers::pi, static_cast<double>(n));
  return factor * std::pow(base, -static_cast<double>(n + 1));
}

cplx polydisc_kernel_closed(std::span<const cplx> z, std::span<const cplx> w) {
  if (z.size() != w.size()) throw DimensionError("polydisc_kernel_closed: dimension mismatch");
  cplx value{1.0, 0.0};
  for (std::size_t k = 0; k < z.size(); ++k) {
    const cplx t = z[k] * std::conj(w[k]);
    if (std::abs(t) >= 1.0) throw SingularInputError("polydisc_kernel_closed: requires |z_k conj(w_k)| < 1");
    const cplx base = 1.0 - t;
    value *= 1.0 / (std::numbers::pi * base * base);
  }
  return value;
}

KernelEvaluator series_evaluator(KernelSeries series) {
  auto shared = std::make_shared<const KernelSeries>(std::move(series));
  return [shared](std::span<const cplx> z, std::span<const cplx> w) {
    return eval_kernel(*shared, z, w);
  };
}

KernelEvaluator ball_evaluator(std::size_t n) {
  return [n](std::span<const cplx> z, std::span<const cplx> w) {
    EvalResult r;
    r.value = ball_kernel_closed(z, w, n);
    r.rounding_bound = 8.0 * (n + 2) * kEps * std::abs(r.value);
    return r;
  };
}

KernelEvaluator polydisc_evaluator() {
  return [](std::span<const cplx> z, std::span<const cplx> w) {
    EvalResult r;
    r.value = polydisc_kernel_closed(z, w);
    r.rounding_bound = 8.0 * (z.size() + 2) * kEps * std::abs(r.value);
    return r;
  };
}

std::optional<KernelEvaluator> closed_form_evaluator(const EllipsoidSpec& spec) {
  if (spec.dim() == 1) return polydisc_evaluator();
  if (spec.is_ball()) return ball_evaluator(spec.dim());
  return std::nullopt;
}

void write_coefficients_csv(const KernelSeries& series, std::ostream& os) {
  const std::size_t n = series.spec().dim();
  std::vector<std::string> header;
  for (std::size_t k = 0; k < n; ++k) header.push_back("alpha_" + std::to_string(k + 1));
  header.emplace_back("log_coeff");
  CsvWriter csv(os, header);
  const auto idx = series.flat_indices();
  const auto log_c = series.log_coeffs();
  for (std::size_t row = 0; row < series.size(); ++row) {
    for (std::size_t k = 0; k < n; ++k) csv.field(idx[row * n + k]);
    csv.field(log_c[row]);
    csv.end_row();
  }
}

} // namespace bergman
