#pragma once

#include <span>
#include <vector>

#include "bergman/ellipsoid.hpp"

namespace bergman {

/// Gauss-Legendre rule mapped to [0, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(std::size_t count);

/// Tensor rule for integrals over an ellipsoid in polar coordinates
/// z_k = r_k e^{i theta_k}, dV = prod r_k dr_k dtheta_k.
///
/// Radial part: s_k = r_k^{2 m_k} ranges over the simplex sum s_k < 1, which is
/// parametrized by stick-breaking s_k = v_k prod_{i<k} (1 - v_i), v in [0,1]^n.
/// Each v_i is the polynomial incomplete-beta map I_y(a_i, b_i) of a
/// Gauss-Legendre variable y_i; with a_i = m_i and b_i = lcm(m_k, k > i) the
/// monomial integrands become analytic in y for integer exponents, so the rule
/// converges spectrally. Angular part: Q equispaced nodes per coordinate.
class QuadratureGrid {
public:
  explicit QuadratureGrid(EllipsoidSpec spec, std::size_t radial_nodes = 48, std::size_t angular_nodes = 64);

  const EllipsoidSpec& spec() const { return spec_; }
  std::size_t radial_nodes() const { return radial_nodes_; }
  std::size_t angular_nodes() const { return angular_nodes_; }

  /// Number of radial tensor nodes, radial_nodes()^n.
  std::size_t radial_count() const { return weights_.size(); }
  std::span<const double> moduli(std::size_t node) const {
    return {moduli_.data() + node * spec_.dim(), spec_.dim()};
  }
  /// Full weight of every angular point at this radial node.
  double weight(std::size_t node) const { return weights_[node]; }
  double angle(std::size_t j) const;

  /// Sum of all weights; equals volume(spec) up to quadrature error.
  double total_weight() const;

  /// Grid with radial and angular resolution doubled.
  QuadratureGrid refined() const { return QuadratureGrid(spec_, 2 * radial_nodes_, 2 * angular_nodes_); }

private:
  EllipsoidSpec spec_;
  std::size_t radial_nodes_;
  std::size_t angular_nodes_;
  std::vector<double> moduli_;
  std::vector<double> weights_;
};

} // namespace bergman
