#include "bergman/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "bergman/summation.hpp"

namespace bergman {

namespace {

int smoothing_order(double m) {
  const double r = std::round(m);
  if (std::abs(m - r) < 1e-12 && r >= 1.0) return static_cast<int>(r);
  return std::max(1, static_cast<int>(std::ceil(m)));
}

// Polynomial map y -> I_y(a, b) (regularized incomplete beta with integer
// parameters), its complement 1 - I_y(a, b) and its derivative.
struct BetaMap {
  int a;
  int b;
  std::vector<double> binom;  // C(a+b-1, j)
  double dnorm;               // (a+b-1)! / ((a-1)! (b-1)!)

  BetaMap(int a_, int b_) : a(a_), b(b_) {
    const int N = a + b - 1;
    binom.assign(static_cast<std::size_t>(N) + 1, 1.0);
    for (int j = 1; j <= N; ++j) binom[j] = binom[j - 1] * (N - j + 1) / j;
    dnorm = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b));
  }

  void eval(double y, double& v, double& one_minus_v, double& dv) const {
    const int N = a + b - 1;
    const double u = 1.0 - y;
    v = 0.0;
    one_minus_v = 0.0;
    for (int j = 0; j <= N; ++j) {
      const double term = binom[j] * std::pow(y, j) * std::pow(u, N - j);
      (j >= a ? v : one_minus_v) += term;
    }
    dv = dnorm * std::pow(y, a - 1) * std::pow(u, b - 1);
  }
};

} // namespace

GaussLegendreRule gauss_legendre(std::size_t count) {
  if (count == 0) throw std::invalid_argument("gauss_legendre: count must be >= 1");
  GaussLegendreRule rule;
  rule.nodes.resize(count);
  rule.weights.resize(count);
  if (count == 1) {
    rule.nodes[0] = 0.5;
    rule.weights[0] = 1.0;
    return rule;
  }
  const auto n = static_cast<double>(count);
  // P_n(x) and P_n'(x) by the three-term recurrence.
  auto legendre = [count, n](double x, double& p, double& dp) {
    double p0 = 1.0;
    double p1 = x;
    for (std::size_t k = 2; k <= count; ++k) {
      const auto kd = static_cast<double>(k);
      const double p2 = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
      p0 = p1;
      p1 = p2;
    }
    p = p1;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
  };
  for (std::size_t i = 0; i < count / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (n + 0.5));
    double p = 0.0;
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      legendre(x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(x, p, dp);
    const double w = 1.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = (1.0 - x) / 2.0;
    rule.weights[i] = w;
    rule.nodes[count - 1 - i] = (1.0 + x) / 2.0;
    rule.weights[count - 1 - i] = w;
  }
  if (count % 2 == 1) {
    double p = 0.0;
    double dp = 1.0;
    legendre(0.0, p, dp);
    rule.nodes[count / 2] = 0.5;
    rule.weights[count / 2] = 1.0 / (dp * dp);
  }
  return rule;
}

QuadratureGrid::QuadratureGrid(EllipsoidSpec spec, std::size_t radial_nodes, std::size_t angular_nodes)
    : spec_(std::move(spec)), radial_nodes_(radial_nodes), angular_nodes_(angular_nodes) {
  if (radial_nodes_ == 0 || angular_nodes_ == 0) {
    throw std::invalid_argument("QuadratureGrid: node counts must be >= 1");
  }
  const std::size_t n = spec_.dim();
  const GaussLegendreRule gl = gauss_legendre(radial_nodes_);

  std::vector<BetaMap> maps;
  for (std::size_t i = 0; i < n; ++i) {
    int b = 1;
    for (std::size_t k = i + 1; k < n; ++k) b = std::lcm(b, smoothing_order(spec_.exponent(k)));
    maps.emplace_back(smoothing_order(spec_.exponent(i)), std::min(b, 64));
  }

  const double angular_weight =
      std::pow(2.0 * std::numbers::pi / static_cast<double>(angular_nodes_), static_cast<double>(n));

  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= radial_nodes_;
  moduli_.resize(total * n);
  weights_.resize(total);

  std::vector<std::size_t> digit(n, 0);
  std::vector<double> v(n), omv(n), dv(n);
  for (std::size_t node = 0; node < total; ++node) {
    double w = angular_weight;
    for (std::size_t i = 0; i < n; ++i) {
      maps[i].eval(gl.nodes[digit[i]], v[i], omv[i], dv[i]);
      w *= gl.weights[digit[i]] * dv[i];
      // stick-breaking Jacobian
      w *= std::pow(omv[i], static_cast<double>(n - 1 - i));
    }
    double remaining = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double s = v[k] * remaining;
      remaining *= omv[k];
      const double m = spec_.exponent(k);
      moduli_[node * n + k] = std::pow(s, 1.0 / (2.0 * m));
      w *= std::pow(s, 1.0 / m - 1.0) / (2.0 * m);
    }
    weights_[node] = w;
    for (std::size_t i = n; i-- > 0;) {
      if (++digit[i] < radial_nodes_) break;
      digit[i] = 0;
    }
  }
}

double QuadratureGrid::angle(std::size_t j) const {
  return 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(angular_nodes_);
}

double QuadratureGrid::total_weight() const {
  CompensatedSum s;
  for (double w : weights_) s.add(w);
  return s.value() * std::pow(static_cast<double>(angular_nodes_), static_cast<double>(spec_.dim()));
}

} // namespace bergman
