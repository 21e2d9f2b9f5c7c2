#include "bergman/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace bergman {

namespace {

struct Simplex {
  std::vector<std::vector<double>> x;
  std::vector<double> f;
};

// One Nelder-Mead run; returns true on convergence.
bool run(const Objective& f, Simplex& s, std::size_t& evals, const NelderMeadOptions& opt) {
  const std::size_t n = s.x.front().size();
  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);

  auto eval = [&](const std::vector<double>& p) {
    ++evals;
    const double v = f(p);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  while (evals < opt.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s.f[a] < s.f[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[n - 1];

    double spread = 0.0;
    double size = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      spread = std::max(spread, std::abs(s.f[i] - s.f[best]));
      for (std::size_t k = 0; k < n; ++k) size = std::max(size, std::abs(s.x[i][k] - s.x[best][k]));
    }
    if (size <= opt.x_tol && spread <= opt.f_tol_abs + opt.f_tol_rel * std::abs(s.f[best])) return true;
    if (size == 0.0) return true;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < n; ++k) centroid[k] += s.x[i][k];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    for (std::size_t k = 0; k < n; ++k) xr[k] = centroid[k] + (centroid[k] - s.x[worst][k]);
    const double fr = eval(xr);
    if (fr < s.f[best]) {
      for (std::size_t k = 0; k < n; ++k) xe[k] = centroid[k] + 2.0 * (centroid[k] - s.x[worst][k]);
      const double fe = eval(xe);
      if (fe < fr) {
        s.x[worst] = xe;
        s.f[worst] = fe;
      } else {
        s.x[worst] = xr;
        s.f[worst] = fr;
      }
      continue;
    }
    if (fr < s.f[second]) {
      s.x[worst] = xr;
      s.f[worst] = fr;
      continue;
    }
    const bool outside = fr < s.f[worst];
    for (std::size_t k = 0; k < n; ++k) {
      xc[k] = outside ? centroid[k] + 0.5 * (xr[k] - centroid[k]) : centroid[k] + 0.5 * (s.x[worst][k] - centroid[k]);
    }
    const double fc = eval(xc);
    if (fc < (outside ? fr : s.f[worst])) {
      s.x[worst] = xc;
      s.f[worst] = fc;
      continue;
    }
    // shrink toward the best vertex
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t k = 0; k < n; ++k) s.x[i][k] = s.x[best][k] + 0.5 * (s.x[i][k] - s.x[best][k]);
      s.f[i] = eval(s.x[i]);
    }
  }
  return false;
}

Simplex build(const Objective& f, const std::vector<double>& x0, const std::vector<double>& steps, std::size_t& evals) {
  Simplex s;
  const std::size_t n = x0.size();
  s.x.assign(n + 1, x0);
  s.f.resize(n + 1);
  for (std::size_t i = 0; i < n; ++i) s.x[i + 1][i] += steps[i];
  for (std::size_t i = 0; i <= n; ++i) {
    ++evals;
    s.f[i] = f(s.x[i]);
    if (std::isnan(s.f[i])) s.f[i] = std::numeric_limits<double>::infinity();
  }
  return s;
}

} // namespace

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, std::vector<double> steps,
                             const NelderMeadOptions& options) {
  if (x0.empty() || steps.size() != x0.size()) throw std::invalid_argument("nelder_mead: bad dimensions");
  std::size_t evals = 0;
  NelderMeadResult result;
  result.x = x0;
  result.value = std::numeric_limits<double>::infinity();

  double scale = 1.0;
  for (int round = 0; round <= options.restarts; ++round) {
    std::vector<double> scaled(steps);
    for (double& st : scaled) st *= scale;
    Simplex s = build(f, result.value < std::numeric_limits<double>::infinity() ? result.x : x0, scaled, evals);
    const bool converged = run(f, s, evals, options);
    const auto best = static_cast<std::size_t>(std::min_element(s.f.begin(), s.f.end()) - s.f.begin());
    if (s.f[best] <= result.value) {
      result.value = s.f[best];
      result.x = s.x[best];
    }
    result.converged = converged;
    if (evals >= options.max_evaluations) break;
    scale *= options.restart_scale;
  }
  result.evaluations = evals;
  return result;
}

} // namespace bergman
