#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "bergman/ellipsoid.hpp"
#include "bergman/quadrature.hpp"
#include "bergman/transforms.hpp"

namespace bergman {

/// Pointwise function on the domain, z -> f(z).
using FieldFunction = std::function<cplx(std::span<const cplx>)>;

/// Truncated monomial expansion sum_{|alpha| <= cap} coef_alpha z^alpha of a projection Pf.
struct ProjectedFunction {
  EllipsoidSpec spec;
  int cap = 0;
  /// graded-lex order
  std::vector<cplx> coefficients;
  /// Flat graded-lex index table matching coefficients (filled by project()).
  std::vector<int> indices;

  bool refinement_checked = false;
  bool unstable = false;
  /// Largest coefficient change under grid doubling (when checked).
  double refinement_delta = 0.0;

  cplx coefficient(const MultiIndex& alpha) const;
  cplx operator()(std::span<const cplx> z) const;
};

class TestFunction;

namespace test_function {
struct Constant {
  cplx value;
};
struct Monomial {
  MultiIndex alpha;
};
struct AntiHolomorphicMonomial {
  MultiIndex alpha;
};
/// exp(-1 / (1 - (s/rho)^2)) in the defect variable s = sum |z_k|^{2 m_k}, zero for s >= rho.
struct RadialBump {
  double radius;
};
/// Same profile in the Euclidean distance |z - center|, support radius `radius`.
/// The support must lie inside the domain.
struct Bump {
  ComplexPoint center;
  double radius;
};
struct Product {
  std::vector<TestFunction> factors;
};
/// A truncated series, e.g. a previous projection.
struct Series {
  std::shared_ptr<const ProjectedFunction> series;
};
} // namespace test_function

class TestFunction {
public:
  using Kind = std::variant<test_function::Constant, test_function::Monomial,
                            test_function::AntiHolomorphicMonomial, test_function::RadialBump,
                            test_function::Bump, test_function::Product, test_function::Series>;

  static TestFunction constant(cplx value);
  static TestFunction monomial(MultiIndex alpha);
  static TestFunction anti_holomorphic_monomial(MultiIndex alpha);
  static TestFunction radial_bump(double radius);
  static TestFunction bump(ComplexPoint center, double radius);
  static TestFunction product(std::vector<TestFunction> factors);
  static TestFunction series(ProjectedFunction pf);

  const Kind& kind() const { return kind_; }
  cplx operator()(const EllipsoidSpec& spec, std::span<const cplx> z) const;
  FieldFunction bind(const EllipsoidSpec& spec) const;
  std::string describe() const;

private:
  explicit TestFunction(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

/// The fixed smooth compactly supported profile exp(-1/(1-x^2)) on |x| < 1.
double bump_profile(double x);

/// Quadrature approximation of the integral of f over the grid's domain.
cplx integrate(const QuadratureGrid& grid, const FieldFunction& f);

/// <f, z^alpha> = integral of f conj(z^alpha) for |alpha| <= cap, graded-lex order.
std::vector<cplx> monomial_inner_products(const QuadratureGrid& grid, const FieldFunction& f, int cap);

struct ProjectOptions {
  /// Re-project on the doubled grid and flag coefficients that move by more than tol.
  bool check_refinement = false;
  double refinement_tol = 1e-8;
};

/// Coefficients <g, z^alpha> / ||z^alpha||^2 with exact moments.
ProjectedFunction project(const FieldFunction& g, const QuadratureGrid& grid, int cap,
                          const ProjectOptions& options = {});
ProjectedFunction project(const TestFunction& g, const QuadratureGrid& grid, int cap,
                          const ProjectOptions& options = {});

/// Deterministic interior sample points with defect <= max_defect.
std::vector<ComplexPoint> default_sample_points(const EllipsoidSpec& spec, std::size_t count,
                                                double max_defect = 0.25, std::uint64_t seed = 17);

/// max over samples of |P(Pg) - Pg|.
double idempotence_check(const TestFunction& g, const QuadratureGrid& grid, int cap,
                         const std::vector<ComplexPoint>& samples);

/// |<Pg, h> - <g, Ph>| with both pairings computed by quadrature.
double self_adjointness_check(const TestFunction& g, const TestFunction& h, const QuadratureGrid& grid,
                              int cap);

struct ContinuationEstimate {
  /// max over the top degree layers of |coef|^{1/|alpha|}; < 1 signals a series
  /// converging beyond the closed domain.
  double radius = 0.0;
  /// No coefficient above the noise floor in the top layers (polynomial within cap).
  bool finite_degree = false;
  bool low_confidence = false;
  std::size_t nonzero = 0;
};

ContinuationEstimate continuation_radius_proxy(const ProjectedFunction& pf, int top_layers = 3,
                                               double noise_rel = 1e-12);

struct IdentitySample {
  ComplexPoint z;
  cplx lhs{};
  cplx rhs{};
  double residual = 0.0;
};

struct IdentityCheck {
  std::string map;
  double max_residual = 0.0;
  std::vector<IdentitySample> rows;
};

/// P1(J (g o Phi))(z) against J(z) (P2 g)(Phi(z)) for a biholomorphic Phi:
/// source -> target; g lives on the target.
IdentityCheck bell_projection_identity_check(const HoloMap& map, const TestFunction& g,
                                             const QuadratureGrid& source_grid,
                                             const QuadratureGrid& target_grid, int cap,
                                             const std::vector<ComplexPoint>& samples);

/// CSV: alpha_1..alpha_n,re,im.
void write_projection_csv(const ProjectedFunction& pf, std::ostream& os);

} // namespace bergman
