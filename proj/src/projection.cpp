#include "bergman/projection.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "bergman/csv.hpp"
#include "bergman/errors.hpp"
#include "bergman/parallel.hpp"
#include "bergman/rng.hpp"
#include "bergman/summation.hpp"

namespace bergman {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<int> flat_index_table(std::size_t n, int cap) {
  std::vector<int> flat;
  for (const auto& alpha : enumerate_indices(n, cap)) {
    flat.insert(flat.end(), alpha.entries().begin(), alpha.entries().end());
  }
  return flat;
}

// Calls visit(flat_angular_index, point) for every point of the angular tensor grid at moduli r.
template <typename Visit>
void for_each_angular_point(std::span<const double> r, std::span<const cplx> cis, Visit&& visit) {
  const std::size_t n = r.size();
  const std::size_t q = cis.size();
  std::vector<std::size_t> digit(n, 0);
  ComplexPoint z(n);
  for (std::size_t k = 0; k < n; ++k) z[k] = r[k] * cis[0];
  std::size_t total = 1;
  for (std::size_t k = 0; k < n; ++k) total *= q;
  for (std::size_t flat = 0; flat < total; ++flat) {
    visit(flat, std::span<const cplx>(z));
    for (std::size_t k = n; k-- > 0;) {
      if (++digit[k] < q) {
        z[k] = r[k] * cis[digit[k]];
        break;
      }
      digit[k] = 0;
      z[k] = r[k] * cis[0];
    }
  }
}

std::vector<cplx> unit_roots(const QuadratureGrid& grid) {
  std::vector<cplx> cis(grid.angular_nodes());
  for (std::size_t j = 0; j < cis.size(); ++j) cis[j] = std::polar(1.0, grid.angle(j));
  return cis;
}

} // namespace

cplx ProjectedFunction::coefficient(const MultiIndex& alpha) const {
  require_dim(spec, alpha.size(), "ProjectedFunction::coefficient");
  if (alpha.degree() > cap) return {};
  return coefficients.at(graded_lex_rank(alpha));
}

cplx ProjectedFunction::operator()(std::span<const cplx> z) const {
  require_dim(spec, z.size(), "ProjectedFunction");
  const std::size_t n = spec.dim();
  const auto width = static_cast<std::size_t>(cap) + 1;
  std::vector<cplx> pw(n * width);
  for (std::size_t k = 0; k < n; ++k) {
    pw[k * width] = 1.0;
    for (std::size_t a = 1; a < width; ++a) pw[k * width + a] = pw[k * width + a - 1] * z[k];
  }
  std::vector<int> local;
  const std::vector<int>* idx = &indices;
  if (indices.size() != coefficients.size() * n) {
    local = flat_index_table(n, cap);
    idx = &local;
  }
  CompensatedComplexSum sum;
  for (std::size_t row = 0; row < coefficients.size(); ++row) {
    if (coefficients[row] == cplx{}) continue;
    cplx term = coefficients[row];
    for (std::size_t k = 0; k < n; ++k) term *= pw[k * width + static_cast<std::size_t>((*idx)[row * n + k])];
    sum.add(term);
  }
  return sum.value();
}

double bump_profile(double x) {
  const double x2 = x * x;
  if (x2 >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - x2));
}

TestFunction TestFunction::constant(cplx value) { return TestFunction(test_function::Constant{value}); }

TestFunction TestFunction::monomial(MultiIndex alpha) { return TestFunction(test_function::Monomial{std::move(alpha)}); }

TestFunction TestFunction::anti_holomorphic_monomial(MultiIndex alpha) {
  return TestFunction(test_function::AntiHolomorphicMonomial{std::move(alpha)});
}

TestFunction TestFunction::radial_bump(double radius) {
  if (!(radius > 0.0 && radius < 1.0)) throw std::invalid_argument("radial_bump: support radius must lie in (0, 1)");
  return TestFunction(test_function::RadialBump{radius});
}

TestFunction TestFunction::bump(ComplexPoint center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("bump: radius must be > 0");
  return TestFunction(test_function::Bump{std::move(center), radius});
}

TestFunction TestFunction::product(std::vector<TestFunction> factors) {
  return TestFunction(test_function::Product{std::move(factors)});
}

TestFunction TestFunction::series(ProjectedFunction pf) {
  if (pf.indices.size() != pf.coefficients.size() * pf.spec.dim()) {
    pf.indices = flat_index_table(pf.spec.dim(), pf.cap);
  }
  return TestFunction(test_function::Series{std::make_shared<const ProjectedFunction>(std::move(pf))});
}

cplx TestFunction::operator()(const EllipsoidSpec& spec, std::span<const cplx> z) const {
  using namespace test_function;
  return std::visit(overloaded{
                        [](const Constant& c) { return c.value; },
                        [&](const Monomial& m) {
                          cplx v{1.0, 0.0};
                          for (std::size_t k = 0; k < z.size(); ++k) v *= std::pow(z[k], m.alpha[k]);
                          return v;
                        },
                        [&](const AntiHolomorphicMonomial& m) {
                          cplx v{1.0, 0.0};
                          for (std::size_t k = 0; k < z.size(); ++k) v *= std::pow(std::conj(z[k]), m.alpha[k]);
                          return v;
                        },
                        [&](const RadialBump& b) { return cplx(bump_profile(defect(spec, z) / b.radius), 0.0); },
                        [&](const Bump& b) {
                          double d2 = 0.0;
                          for (std::size_t k = 0; k < z.size(); ++k) d2 += std::norm(z[k] - b.center[k]);
                          return cplx(bump_profile(std::sqrt(d2) / b.radius), 0.0);
                        },
                        [&](const Product& p) {
                          cplx v{1.0, 0.0};
                          for (const auto& f : p.factors) v *= f(spec, z);
                          return v;
                        },
                        [&](const Series& s) { return (*s.series)(z); },
                    },
                    kind_);
}

FieldFunction TestFunction::bind(const EllipsoidSpec& spec) const {
  return [self = *this, spec](std::span<const cplx> z) { return self(spec, z); };
}

std::string TestFunction::describe() const {
  using namespace test_function;
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const Constant& c) { os << "constant:" << format_complex(c.value); },
                 [&](const Monomial& m) { os << "monomial:" << to_string(m.alpha); },
                 [&](const AntiHolomorphicMonomial& m) { os << "antiholomorphic:" << to_string(m.alpha); },
                 [&](const RadialBump& b) { os << "radial-bump:" << format_double(b.radius); },
                 [&](const Bump& b) {
                   os << "bump:";
                   for (const auto& c : b.center) os << format_complex(c) << ';';
                   os << format_double(b.radius);
                 },
                 [&](const Product& p) {
                   os << "product[";
                   for (std::size_t k = 0; k < p.factors.size(); ++k) os << (k ? "|" : "") << p.factors[k].describe();
                   os << ']';
                 },
                 [&](const Series& s) { os << "series:cap=" << s.series->cap; },
             },
             kind_);
  std::string out = os.str();
  for (char& ch : out) {
    if (ch == ',') ch = ';';
  }
  return out;
}

cplx integrate(const QuadratureGrid& grid, const FieldFunction& f) {
  const auto cis = unit_roots(grid);
  const std::size_t count = grid.radial_count();
  std::vector<cplx> partial(count);
  parallel_for(count, [&](std::size_t node) {
    CompensatedComplexSum s;
    for_each_angular_point(grid.moduli(node), cis, [&](std::size_t, std::span<const cplx> z) { s.add(f(z)); });
    partial[node] = grid.weight(node) * s.value();
  });
  return pairwise_row_sum<cplx>(partial, count, 1)[0];
}

std::vector<cplx> monomial_inner_products(const QuadratureGrid& grid, const FieldFunction& f, int cap) {
  if (cap < 0) throw std::invalid_argument("monomial_inner_products: cap must be >= 0");
  const std::size_t n = grid.spec().dim();
  const std::size_t q = grid.angular_nodes();
  const auto width = static_cast<std::size_t>(cap) + 1;
  const auto cis = unit_roots(grid);
  const std::vector<int> flat = flat_index_table(n, cap);
  const std::size_t terms = flat.size() / n;

  // e^{-i a theta_j}
  std::vector<cplx> dft(width * q);
  for (std::size_t a = 0; a < width; ++a) {
    for (std::size_t j = 0; j < q; ++j) {
      dft[a * q + j] = std::polar(1.0, -static_cast<double>(a) * grid.angle(j));
    }
  }

  std::size_t angular_total = 1;
  for (std::size_t k = 0; k < n; ++k) angular_total *= q;

  const std::size_t count = grid.radial_count();
  std::vector<cplx> table(count * terms);
  parallel_for(count, [&](std::size_t node) {
    const auto r = grid.moduli(node);
    std::vector<cplx> cur(angular_total);
    for_each_angular_point(r, cis, [&](std::size_t idx, std::span<const cplx> z) { cur[idx] = f(z); });

    // Transform one angular axis at a time: (done..., Q, rest...) -> (done..., cap+1, rest...).
    std::size_t outer = 1;
    std::size_t inner = angular_total / q;
    std::vector<cplx> next;
    for (std::size_t k = 0; k < n; ++k) {
      next.assign(outer * width * inner, cplx{});
      for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t a = 0; a < width; ++a) {
          cplx* dst = next.data() + (o * width + a) * inner;
          for (std::size_t j = 0; j < q; ++j) {
            const cplx e = dft[a * q + j];
            const cplx* src = cur.data() + (o * q + j) * inner;
            for (std::size_t i = 0; i < inner; ++i) dst[i] += src[i] * e;
          }
        }
      }
      cur.swap(next);
      outer *= width;
      if (k + 1 < n) inner /= q;
    }

    std::vector<double> rpow(n * width);
    for (std::size_t k = 0; k < n; ++k) {
      rpow[k * width] = 1.0;
      for (std::size_t a = 1; a < width; ++a) rpow[k * width + a] = rpow[k * width + a - 1] * r[k];
    }
    const double w = grid.weight(node);
    for (std::size_t row = 0; row < terms; ++row) {
      std::size_t pos = 0;
      double scale = w;
      for (std::size_t k = 0; k < n; ++k) {
        const auto a = static_cast<std::size_t>(flat[row * n + k]);
        pos = pos * width + a;
        scale *= rpow[k * width + a];
      }
      table[node * terms + row] = scale * cur[pos];
    }
  });
  return pairwise_row_sum<cplx>(table, count, terms);
}

ProjectedFunction project(const FieldFunction& g, const QuadratureGrid& grid, int cap, const ProjectOptions& options) {
  const auto& spec = grid.spec();
  ProjectedFunction pf{spec, cap, {}, flat_index_table(spec.dim(), cap)};
  const auto alphas = enumerate_indices(spec, cap);
  auto to_coefficients = [&](const std::vector<cplx>& inner) {
    std::vector<cplx> c(inner.size());
    for (std::size_t row = 0; row < inner.size(); ++row) c[row] = inner[row] * std::exp(-log_moment(spec, alphas[row]));
    return c;
  };
  pf.coefficients = to_coefficients(monomial_inner_products(grid, g, cap));
  if (options.check_refinement) {
    const auto fine = to_coefficients(monomial_inner_products(grid.refined(), g, cap));
    double scale = 0.0;
    double delta = 0.0;
    for (std::size_t row = 0; row < fine.size(); ++row) {
      scale = std::max(scale, std::abs(fine[row]));
      delta = std::max(delta, std::abs(fine[row] - pf.coefficients[row]));
    }
    pf.refinement_checked = true;
    pf.refinement_delta = scale > 0.0 ? delta / scale : delta;
    pf.unstable = pf.refinement_delta > options.refinement_tol;
  }
  return pf;
}

ProjectedFunction project(const TestFunction& g, const QuadratureGrid& grid, int cap, const ProjectOptions& options) {
  return project(g.bind(grid.spec()), grid, cap, options);
}

std::vector<ComplexPoint> default_sample_points(const EllipsoidSpec& spec, std::size_t count, double max_defect,
                                                std::uint64_t seed) {
  if (!(max_defect > 0.0 && max_defect < 1.0)) throw std::invalid_argument("default_sample_points: max_defect in (0,1)");
  SplitMix64 rng(seed);
  std::vector<ComplexPoint> out;
  out.reserve(count);
  const std::size_t n = spec.dim();
  ComplexPoint z(n);
  while (out.size() < count) {
    for (std::size_t k = 0; k < n; ++k) {
      const double r = std::sqrt(rng.uniform());
      z[k] = std::polar(r, 2.0 * std::numbers::pi * rng.uniform());
    }
    if (defect(spec, z) <= max_defect) out.push_back(z);
  }
  return out;
}

double idempotence_check(const TestFunction& g, const QuadratureGrid& grid, int cap,
                         const std::vector<ComplexPoint>& samples) {
  const ProjectedFunction once = project(g, grid, cap);
  const ProjectedFunction twice = project(TestFunction::series(once), grid, cap);
  double residual = 0.0;
  for (const auto& z : samples) residual = std::max(residual, std::abs(twice(z) - once(z)));
  return residual;
}

double self_adjointness_check(const TestFunction& g, const TestFunction& h, const QuadratureGrid& grid, int cap) {
  const auto& spec = grid.spec();
  const ProjectedFunction pg = project(g, grid, cap);
  const ProjectedFunction ph = project(h, grid, cap);
  const cplx lhs = integrate(grid, [&](std::span<const cplx> z) { return pg(z) * std::conj(h(spec, z)); });
  const cplx rhs = integrate(grid, [&](std::span<const cplx> z) { return g(spec, z) * std::conj(ph(z)); });
  return std::abs(lhs - rhs);
}

ContinuationEstimate continuation_radius_proxy(const ProjectedFunction& pf, int top_layers, double noise_rel) {
  const std::size_t n = pf.spec.dim();
  double scale = 0.0;
  for (const auto& c : pf.coefficients) scale = std::max(scale, std::abs(c));
  const double floor = noise_rel * scale;

  ContinuationEstimate est;
  const int first_top = std::max(1, pf.cap - top_layers + 1);
  bool top_hit = false;
  for (int d = 1; d <= pf.cap; ++d) {
    for (std::size_t row = index_count(n, d - 1); row < index_count(n, d); ++row) {
      const double mag = std::abs(pf.coefficients[row]);
      if (mag <= floor) continue;
      ++est.nonzero;
      if (d >= first_top) {
        top_hit = true;
        est.radius = std::max(est.radius, std::pow(mag, 1.0 / d));
      }
    }
  }
  est.finite_degree = !top_hit;
  est.low_confidence = est.finite_degree || est.nonzero < 3;
  return est;
}

IdentityCheck bell_projection_identity_check(const HoloMap& map, const TestFunction& g,
                                             const QuadratureGrid& source_grid, const QuadratureGrid& target_grid,
                                             int cap, const std::vector<ComplexPoint>& samples) {
  if (!map.is_biholomorphic()) throw std::invalid_argument("bell_projection_identity_check: map must be biholomorphic");
  if (!(source_grid.spec() == map.source()) || !(target_grid.spec() == map.target())) {
    throw std::invalid_argument("bell_projection_identity_check: grids do not match the map's domains");
  }
  const auto& target = map.target();
  const FieldFunction pulled = [&](std::span<const cplx> z) {
    return map.jacobian_det(z) * g(target, map.apply_raw(z));
  };
  const ProjectedFunction lhs_series = project(pulled, source_grid, cap);
  const ProjectedFunction rhs_series = project(g, target_grid, cap);

  IdentityCheck out;
  out.map = map.describe();
  for (const auto& z : samples) {
    IdentitySample row;
    row.z = z;
    row.lhs = lhs_series(z);
    row.rhs = map.jacobian_det(z) * rhs_series(map.apply(z));
    row.residual = std::abs(row.lhs - row.rhs);
    out.max_residual = std::max(out.max_residual, row.residual);
    out.rows.push_back(std::move(row));
  }
  return out;
}

void write_projection_csv(const ProjectedFunction& pf, std::ostream& os) {
  const std::size_t n = pf.spec.dim();
  std::vector<std::string> header;
  for (std::size_t k = 0; k < n; ++k) header.push_back("alpha_" + std::to_string(k + 1));
  header.emplace_back("re");
  header.emplace_back("im");
  CsvWriter csv(os, header);
  const auto alphas = enumerate_indices(pf.spec, pf.cap);
  for (std::size_t row = 0; row < alphas.size(); ++row) {
    for (std::size_t k = 0; k < n; ++k) csv.field(alphas[row][k]);
    csv.field(pf.coefficients[row].real());
    csv.field(pf.coefficients[row].imag());
    csv.end_row();
  }
}

} // namespace bergman
