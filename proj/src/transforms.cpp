#include "bergman/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bergman/csv.hpp"
#include "bergman/errors.hpp"

namespace bergman {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

cplx hermitian(std::span<const cplx> z, std::span<const cplx> w) {
  cplx s{};
  for (std::size_t k = 0; k < z.size(); ++k) s += z[k] * std::conj(w[k]);
  return s;
}

int permutation_sign(const std::vector<std::size_t>& sigma) {
  std::vector<bool> seen(sigma.size(), false);
  int sign = 1;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (seen[i]) continue;
    std::size_t len = 0;
    for (std::size_t k = i; !seen[k]; k = sigma[k]) {
      seen[k] = true;
      ++len;
    }
    if (len % 2 == 0) sign = -sign;
  }
  return sign;
}

} // namespace

HoloMap HoloMap::rotation(const EllipsoidSpec& spec, std::vector<double> angles) {
  require_dim(spec, angles.size(), "HoloMap::rotation");
  return HoloMap(Rotation{std::move(angles)}, spec, spec);
}

HoloMap HoloMap::permutation(const EllipsoidSpec& source, std::vector<std::size_t> sigma) {
  require_dim(source, sigma.size(), "HoloMap::permutation");
  std::vector<bool> hit(sigma.size(), false);
  std::vector<double> target_m(sigma.size());
  for (std::size_t k = 0; k < sigma.size(); ++k) {
    if (sigma[k] >= sigma.size() || hit[sigma[k]]) {
      throw std::invalid_argument("HoloMap::permutation: sigma is not a permutation");
    }
    hit[sigma[k]] = true;
    target_m[k] = source.exponent(sigma[k]);
  }
  return HoloMap(Permutation{std::move(sigma)}, source, EllipsoidSpec(std::move(target_m)));
}

HoloMap HoloMap::ball_automorphism(std::vector<cplx> center) {
  if (center.empty()) throw std::invalid_argument("HoloMap::ball_automorphism: empty center");
  if (!(std::real(hermitian(center, center)) < 1.0)) {
    throw DomainError("HoloMap::ball_automorphism: center must satisfy |a| < 1");
  }
  auto ball = EllipsoidSpec::ball(center.size());
  return HoloMap(BallAutomorphism{std::move(center)}, ball, ball);
}

HoloMap HoloMap::power_map(const EllipsoidSpec& target, int j) {
  if (j < 1) throw std::invalid_argument("HoloMap::power_map: j must be >= 1");
  return HoloMap(PowerMap{j}, target.scaled(j), target);
}

HoloMap HoloMap::compose(std::vector<HoloMap> maps) {
  if (maps.empty()) throw std::invalid_argument("HoloMap::compose: no maps");
  for (std::size_t i = 0; i + 1 < maps.size(); ++i) {
    if (!(maps[i].target() == maps[i + 1].source())) {
      throw std::invalid_argument("HoloMap::compose: target of map " + std::to_string(i) +
                                  " differs from source of the next");
    }
  }
  EllipsoidSpec source = maps.front().source();
  EllipsoidSpec target = maps.back().target();
  return HoloMap(Composition{std::move(maps)}, std::move(source), std::move(target));
}

bool HoloMap::is_biholomorphic() const {
  return std::visit(overloaded{
                        [](const PowerMap& p) { return p.j == 1; },
                        [](const Composition& c) {
                          return std::all_of(c.maps.begin(), c.maps.end(),
                                             [](const HoloMap& m) { return m.is_biholomorphic(); });
                        },
                        [](const auto&) { return true; },
                    },
                    kind_);
}

HoloMap HoloMap::inverse() const {
  return std::visit(
      overloaded{
          [&](const Rotation& r) {
            std::vector<double> neg(r.angles);
            for (double& a : neg) a = -a;
            return rotation(source_, std::move(neg));
          },
          [&](const Permutation& p) {
            std::vector<std::size_t> inv(p.sigma.size());
            for (std::size_t k = 0; k < p.sigma.size(); ++k) inv[p.sigma[k]] = k;
            return permutation(target_, std::move(inv));
          },
          [&](const BallAutomorphism& b) {
            std::vector<cplx> neg(b.center);
            for (auto& a : neg) a = -a;
            return ball_automorphism(std::move(neg));
          },
          [&](const PowerMap& p) {
            if (p.j != 1) throw std::logic_error("HoloMap::inverse: power map with j > 1 is not invertible");
            return *this;
          },
          [&](const Composition& c) {
            std::vector<HoloMap> inv;
            for (auto it = c.maps.rbegin(); it != c.maps.rend(); ++it) inv.push_back(it->inverse());
            return compose(std::move(inv));
          },
      },
      kind_);
}

std::string HoloMap::describe() const {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const Rotation& r) {
                   os << "rotation:";
                   for (std::size_t k = 0; k < r.angles.size(); ++k) os << (k ? ";" : "") << format_double(r.angles[k]);
                 },
                 [&](const Permutation& p) {
                   os << "permutation:";
                   for (std::size_t k = 0; k < p.sigma.size(); ++k) os << (k ? ";" : "") << p.sigma[k];
                 },
                 [&](const BallAutomorphism& b) {
                   os << "ball-automorphism:";
                   for (std::size_t k = 0; k < b.center.size(); ++k) os << (k ? ";" : "") << format_complex(b.center[k]);
                 },
                 [&](const PowerMap& p) { os << "power:" << p.j; },
                 [&](const Composition& c) {
                   os << "compose[";
                   for (std::size_t k = 0; k < c.maps.size(); ++k) os << (k ? "|" : "") << c.maps[k].describe();
                   os << ']';
                 },
             },
             kind_);
  return os.str();
}

ComplexPoint HoloMap::apply(std::span<const cplx> z) const {
  require_dim(source_, z.size(), "HoloMap::apply");
  if (!contains(source_, z)) throw DomainError("HoloMap::apply: point outside the source domain");
  return apply_unchecked(z);
}

cplx HoloMap::jacobian_det(std::span<const cplx> z) const {
  require_dim(source_, z.size(), "HoloMap::jacobian_det");
  return jacobian_unchecked(z);
}

ComplexPoint HoloMap::apply_unchecked(std::span<const cplx> z) const {
  const std::size_t n = z.size();
  return std::visit(
      overloaded{
          [&](const Rotation& r) {
            ComplexPoint out(n);
            for (std::size_t k = 0; k < n; ++k) out[k] = std::polar(1.0, r.angles[k]) * z[k];
            return out;
          },
          [&](const Permutation& p) {
            ComplexPoint out(n);
            for (std::size_t k = 0; k < n; ++k) out[k] = z[p.sigma[k]];
            return out;
          },
          [&](const BallAutomorphism& b) {
            const auto& a = b.center;
            const double a2 = std::real(hermitian(a, a));
            ComplexPoint out(a.begin(), a.end());
            if (a2 == 0.0) return ComplexPoint(z.begin(), z.end());
            const cplx za = hermitian(z, a);
            const double s = std::sqrt(1.0 - a2);
            const cplx denom = 1.0 + za;
            for (std::size_t k = 0; k < n; ++k) {
              const cplx proj = za / a2 * a[k];
              out[k] = (a[k] + proj + s * (z[k] - proj)) / denom;
            }
            return out;
          },
          [&](const PowerMap& p) {
            ComplexPoint out(n);
            for (std::size_t k = 0; k < n; ++k) out[k] = std::pow(z[k], p.j);
            return out;
          },
          [&](const Composition& c) {
            ComplexPoint cur(z.begin(), z.end());
            for (const auto& m : c.maps) cur = m.apply_unchecked(cur);
            return cur;
          },
      },
      kind_);
}

cplx HoloMap::jacobian_unchecked(std::span<const cplx> z) const {
  const std::size_t n = z.size();
  return std::visit(
      overloaded{
          [&](const Rotation& r) {
            double total = 0.0;
            for (double a : r.angles) total += a;
            return std::polar(1.0, total);
          },
          [&](const Permutation& p) { return cplx(permutation_sign(p.sigma), 0.0); },
          [&](const BallAutomorphism& b) {
            const double a2 = std::real(hermitian(b.center, b.center));
            const cplx denom = 1.0 + hermitian(z, b.center);
            const double np1 = static_cast<double>(n + 1);
            return std::pow(1.0 - a2, np1 / 2.0) / std::pow(denom, np1);
          },
          [&](const PowerMap& p) {
            cplx det{1.0, 0.0};
            for (std::size_t k = 0; k < n; ++k) det *= static_cast<double>(p.j) * std::pow(z[k], p.j - 1);
            return det;
          },
          [&](const Composition& c) {
            cplx det{1.0, 0.0};
            ComplexPoint cur(z.begin(), z.end());
            for (const auto& m : c.maps) {
              det *= m.jacobian_unchecked(cur);
              cur = m.apply_unchecked(cur);
            }
            return det;
          },
      },
      kind_);
}

std::vector<LocalInverse> local_inverses(int j, std::span<const cplx> w) {
  if (j < 1) throw std::invalid_argument("local_inverses: j must be >= 1");
  const std::size_t n = w.size();
  std::vector<cplx> root(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (w[k] == cplx{}) throw BranchPointError("local_inverses: coordinate " + std::to_string(k) + " is zero");
    root[k] = std::pow(w[k], 1.0 / j);
  }
  std::size_t branches = 1;
  for (std::size_t k = 0; k < n; ++k) branches *= static_cast<std::size_t>(j);

  std::vector<LocalInverse> out;
  out.reserve(branches);
  std::vector<int> a(n, 0);
  for (std::size_t b = 0; b < branches; ++b) {
    LocalInverse inv{ComplexPoint(n), cplx{1.0, 0.0}};
    for (std::size_t k = 0; k < n; ++k) {
      const cplx omega = std::polar(1.0, 2.0 * std::numbers::pi * a[k] / j);
      inv.preimage[k] = omega * root[k];
      inv.inv_jac_det *= omega / (static_cast<double>(j) * std::pow(root[k], j - 1));
    }
    out.push_back(std::move(inv));
    for (std::size_t k = n; k-- > 0;) {
      if (++a[k] < j) break;
      a[k] = 0;
    }
  }
  return out;
}

namespace {

// An unavailable (infinite) tail bound must not hide the discrepancy.
double relative_residual(cplx lhs, cplx rhs, double tail) {
  const double scale = std::abs(lhs) + (std::isfinite(tail) ? tail : 0.0);
  return scale > 0.0 ? std::abs(lhs - rhs) / scale : std::abs(lhs - rhs);
}

} // namespace

TransformCheck check_biholomorphic_law(const HoloMap& map, const KernelEvaluator& source_kernel,
                                       const KernelEvaluator& target_kernel,
                                       const std::vector<std::pair<ComplexPoint, ComplexPoint>>& pairs) {
  if (!map.is_biholomorphic()) {
    throw std::invalid_argument("check_biholomorphic_law: map is not invertible by construction");
  }
  TransformCheck out;
  out.map = map.describe();
  for (const auto& [z, zeta] : pairs) {
    const EvalResult k1 = source_kernel(z, zeta);
    const ComplexPoint fz = map.apply(z);
    const ComplexPoint fzeta = map.apply(zeta);
    const cplx jz = map.jacobian_det(z);
    const cplx jzeta = map.jacobian_det(zeta);
    const EvalResult k2 = target_kernel(fz, fzeta);
    PairResidual row;
    row.z = z;
    row.zeta = zeta;
    row.lhs = k1.value;
    row.rhs = jz * k2.value * std::conj(jzeta);
    row.tail_bound = k1.tail_bound + std::abs(jz * jzeta) * k2.tail_bound;
    row.residual = relative_residual(row.lhs, row.rhs, row.tail_bound);
    out.max_residual = std::max(out.max_residual, row.residual);
    out.rows.push_back(std::move(row));
  }
  return out;
}

CoveringCheck check_bell_covering_law(int j, const EllipsoidSpec& target_spec, std::span<const cplx> z,
                                      std::span<const cplx> w, const KernelEvaluator& source_kernel,
                                      const KernelEvaluator& target_kernel) {
  const HoloMap map = HoloMap::power_map(target_spec, j);
  require_dim(target_spec, w.size(), "check_bell_covering_law W");
  if (!contains(target_spec, w)) throw DomainError("check_bell_covering_law: W outside the target domain");
  const auto branches = local_inverses(j, w);

  CoveringCheck out;
  out.j = j;
  out.z.assign(z.begin(), z.end());
  out.w.assign(w.begin(), w.end());

  const ComplexPoint image = map.apply(z);
  const cplx jz = map.jacobian_det(z);
  const EvalResult k2 = target_kernel(image, w);
  out.lhs = k2.value * jz;
  double tail = std::abs(jz) * k2.tail_bound;

  cplx rhs{};
  for (const auto& b : branches) {
    const EvalResult k1 = source_kernel(z, b.preimage);
    rhs += k1.value * std::conj(b.inv_jac_det);
    tail += std::abs(b.inv_jac_det) * k1.tail_bound;
  }
  out.rhs = rhs;
  out.tail_bound = tail;
  out.residual = relative_residual(out.lhs, out.rhs, tail);
  return out;
}

CoveringCheck check_bell_covering_law(int j, const EllipsoidSpec& target_spec, std::span<const cplx> z,
                                      std::span<const cplx> w, int source_cap, int target_cap) {
  return check_bell_covering_law(j, target_spec, z, w,
                                 series_evaluator(build_series(target_spec.scaled(j), source_cap)),
                                 series_evaluator(build_series(target_spec, target_cap)));
}

} // namespace bergman
