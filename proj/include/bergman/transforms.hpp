#pragma once

#include <string>
#include <variant>
#include <vector>

#include "bergman/ellipsoid.hpp"
#include "bergman/kernel.hpp"

namespace bergman {

struct Rotation {
  std::vector<double> angles;
};

/// (Phi z)_k = z_{sigma(k)}.
struct Permutation {
  std::vector<std::size_t> sigma;
};

/// z -> (a + P_a z + s_a Q_a z) / (1 + <z,a>), s_a = sqrt(1 - |a|^2): the ball
/// automorphism sending 0 to a. Its inverse is the automorphism at -a.
struct BallAutomorphism {
  std::vector<cplx> center;
};

/// z -> (z_1^j, ..., z_n^j).
struct PowerMap {
  int j = 1;
};

class HoloMap;

struct Composition {
  /// Applied first to last.
  std::vector<HoloMap> maps;
};

class HoloMap {
public:
  using Kind = std::variant<Rotation, Permutation, BallAutomorphism, PowerMap, Composition>;

  static HoloMap rotation(const EllipsoidSpec& spec, std::vector<double> angles);
  static HoloMap permutation(const EllipsoidSpec& source, std::vector<std::size_t> sigma);
  static HoloMap ball_automorphism(std::vector<cplx> center);
  /// Proper map from target.scaled(j) onto target.
  static HoloMap power_map(const EllipsoidSpec& target, int j);
  static HoloMap compose(std::vector<HoloMap> maps);

  const Kind& kind() const { return kind_; }
  const EllipsoidSpec& source() const { return source_; }
  const EllipsoidSpec& target() const { return target_; }

  bool is_biholomorphic() const;
  HoloMap inverse() const;
  std::string describe() const;

  /// Image of z; z must lie in the source domain.
  ComplexPoint apply(std::span<const cplx> z) const;
  /// Image of z without the source-membership check (quadrature nodes at the rim).
  ComplexPoint apply_raw(std::span<const cplx> z) const { return apply_unchecked(z); }
  /// Complex Jacobian determinant at z (chain rule through compositions).
  cplx jacobian_det(std::span<const cplx> z) const;

private:
  HoloMap(Kind kind, EllipsoidSpec source, EllipsoidSpec target)
      : kind_(std::move(kind)), source_(std::move(source)), target_(std::move(target)) {}

  ComplexPoint apply_unchecked(std::span<const cplx> z) const;
  cplx jacobian_unchecked(std::span<const cplx> z) const;

  Kind kind_;
  EllipsoidSpec source_;
  EllipsoidSpec target_;
};

struct LocalInverse {
  ComplexPoint preimage;
  /// Determinant of the derivative of this branch of the inverse, at W.
  cplx inv_jac_det;
};

/// All j^n branches (omega^{a_k} W_k^{1/j})_k, omega = e^{2 pi i/j}, principal root.
std::vector<LocalInverse> local_inverses(int j, std::span<const cplx> w);

struct PairResidual {
  ComplexPoint z;
  ComplexPoint zeta;
  double residual = 0.0;
  double tail_bound = 0.0;
  cplx lhs{};
  cplx rhs{};
};

struct TransformCheck {
  std::string map;
  double max_residual = 0.0;
  std::vector<PairResidual> rows;
};

/// K1(z,zeta) = J(z) K2(Phi z, Phi zeta) conj(J(zeta)) for a biholomorphic map;
/// residuals are |difference| / (|K1| + tail bounds).
TransformCheck check_biholomorphic_law(const HoloMap& map, const KernelEvaluator& source_kernel,
                                       const KernelEvaluator& target_kernel,
                                       const std::vector<std::pair<ComplexPoint, ComplexPoint>>& pairs);

struct CoveringCheck {
  int j = 1;
  ComplexPoint z;
  ComplexPoint w;
  cplx lhs{};
  cplx rhs{};
  double tail_bound = 0.0;
  double residual = 0.0;
};

/// Bell's covering identity for Phi(z) = z^j from target.scaled(j) onto target:
///   K2(Phi(z), W) det Phi'(z) = sum_branches K1(z, branch(W)) conj(inv_jac_det(W)).
CoveringCheck check_bell_covering_law(int j, const EllipsoidSpec& target_spec, std::span<const cplx> z,
                                      std::span<const cplx> w, const KernelEvaluator& source_kernel,
                                      const KernelEvaluator& target_kernel);

/// Same identity with truncated series on both sides.
CoveringCheck check_bell_covering_law(int j, const EllipsoidSpec& target_spec, std::span<const cplx> z,
                                      std::span<const cplx> w, int source_cap, int target_cap);

} // namespace bergman
