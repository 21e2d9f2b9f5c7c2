#include "bergman/luqikeng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "bergman/errors.hpp"
#include "bergman/nelder_mead.hpp"
#include "bergman/parallel.hpp"
#include "bergman/rng.hpp"

namespace bergman {

double ModuliRegion::level(std::span<const double> rho) const {
  require_dim(spec_, rho.size(), "ModuliRegion");
  return moduli_level(spec_, rho);
}

bool ModuliRegion::contains(std::span<const double> rho) const {
  for (double r : rho) {
    if (!(r >= 0.0)) return false;
  }
  return level(rho) < 1.0;
}

bool ModuliRegion::contains_shrunk(std::span<const double> rho, double delta) const {
  std::vector<double> scaled(rho.begin(), rho.end());
  for (double& r : scaled) r /= (1.0 - delta);
  return contains(scaled);
}

double ModuliRegion::boundary_scale(std::span<const double> rho, double delta) const {
  std::vector<double> scaled(rho.size());
  auto level_at = [&](double lambda) {
    for (std::size_t k = 0; k < rho.size(); ++k) scaled[k] = lambda * rho[k] / (1.0 - delta);
    return level(scaled);
  };
  if (level_at(1.0) <= 1.0) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (level_at(mid) <= 1.0 ? lo : hi) = mid;
  }
  return lo;
}

ModuliRegion achievable_moduli(const EllipsoidSpec& spec) { return ModuliRegion(spec); }

void SearchConfig::validate() const {
  if (cap < 1) throw std::invalid_argument("SearchConfig: cap must be >= 1");
  if (starts < 1) throw std::invalid_argument("SearchConfig: starts must be >= 1");
  if (max_iters < 1) throw std::invalid_argument("SearchConfig: max_iters must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("SearchConfig: delta must lie in (0, 1)");
  if (!(zero_threshold_rel > 0.0)) throw std::invalid_argument("SearchConfig: zero_threshold_rel must be > 0");
}

std::string to_string(SearchStatus status) {
  switch (status) {
  case SearchStatus::ZeroFound: return "ZeroFound";
  case SearchStatus::PositiveOnSearch: return "PositiveOnSearch";
  case SearchStatus::Uncertified: return "Uncertified";
  }
  return "Unknown";
}

namespace {

// Maps optimizer coordinates (rho, theta) to t inside the shrunk region.
// Negative moduli fold back to |rho|; points beyond the boundary are reflected
// in log scale about it.
std::vector<cplx> retract(const ModuliRegion& region, std::span<const double> x, double delta) {
  const std::size_t n = x.size() / 2;
  std::vector<double> rho(n);
  for (std::size_t k = 0; k < n; ++k) rho[k] = std::abs(x[k]);
  const double lambda = region.boundary_scale(rho, delta);
  if (lambda < 1.0) {
    for (double& r : rho) r *= lambda * lambda;
  }
  std::vector<cplx> t(n);
  for (std::size_t k = 0; k < n; ++k) t[k] = std::polar(rho[k], x[n + k]);
  return t;
}

std::vector<double> random_start(const ModuliRegion& region, double delta, SplitMix64& rng) {
  const std::size_t n = region.spec().dim();
  std::vector<double> x(2 * n);
  std::vector<double> rho(n);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    for (double& r : rho) r = rng.uniform(0.0, 1.0 - delta);
    if (region.contains_shrunk(rho, delta)) break;
  }
  const double lambda = region.boundary_scale(rho, delta);
  for (std::size_t k = 0; k < n; ++k) x[k] = rho[k] * std::min(lambda, 1.0);
  for (std::size_t k = 0; k < n; ++k) x[n + k] = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return x;
}

} // namespace

SearchReport zero_search(const EllipsoidSpec& spec, const SearchConfig& cfg) {
  cfg.validate();
  return zero_search(build_series(spec, cfg.cap), cfg);
}

SearchReport zero_search(const KernelSeries& series, const SearchConfig& cfg) {
  cfg.validate();
  const ModuliRegion region = achievable_moduli(series.spec());
  const std::size_t n = series.spec().dim();

  NelderMeadOptions nm;
  nm.max_evaluations = cfg.max_iters;
  nm.x_tol = cfg.x_tol;
  nm.f_tol_abs = cfg.f_tol;

  std::vector<StartResult> results(cfg.starts);
  parallel_for(cfg.starts, [&](std::size_t i) {
    SplitMix64 rng = SplitMix64::stream(cfg.seed, i);
    std::vector<double> x0 = random_start(region, cfg.delta, rng);
    std::vector<double> steps(2 * n);
    for (std::size_t k = 0; k < n; ++k) {
      steps[k] = 0.1 * (1.0 - cfg.delta);
      steps[n + k] = 0.5;
    }
    const Objective objective = [&](std::span<const double> x) {
      return std::norm(eval_reinhardt(series, retract(region, x, cfg.delta)).value);
    };
    const NelderMeadResult r = nelder_mead(objective, std::move(x0), std::move(steps), nm);
    StartResult& out = results[i];
    out.index = i;
    out.argmin_t = retract(region, r.x, cfg.delta);
    out.min_abs = std::abs(eval_reinhardt(series, out.argmin_t).value);
    out.evaluations = r.evaluations + 1;
  });

  SearchReport report;
  report.cap = series.cap();
  report.best_start = 0;
  for (const StartResult& r : results) {
    report.evaluations += r.evaluations;
    if (r.min_abs < results[report.best_start].min_abs) report.best_start = r.index;
  }
  const StartResult& best = results[report.best_start];
  report.min_abs = best.min_abs;
  report.argmin_t = best.argmin_t;
  report.zero_threshold = cfg.zero_threshold_rel * std::exp(series.log_coeffs()[0]);

  const EvalResult at = eval_reinhardt(series, report.argmin_t);
  report.error_bound = at.valid ? at.error_bound() : std::numeric_limits<double>::infinity();
  report.margin = report.min_abs - report.error_bound;
  if (!at.valid) {
    report.status = SearchStatus::Uncertified;
  } else if (report.min_abs < report.zero_threshold && report.zero_threshold > report.error_bound) {
    report.status = SearchStatus::ZeroFound;
  } else if (report.margin > 0.0) {
    report.status = SearchStatus::PositiveOnSearch;
  } else {
    report.status = SearchStatus::Uncertified;
  }
  report.starts = std::move(results);
  return report;
}

KernelSeries doctored_disc_series(int cap) {
  return build_series(EllipsoidSpec({1.0}), cap).with_flipped_sign(MultiIndex({1}));
}

TransferReport zero_transfer_experiment(std::span<const double> m, int j, const SearchConfig& cfg,
                                        double covering_tol) {
  if (j < 1) throw std::invalid_argument("zero_transfer_experiment: j must be >= 1");
  const EllipsoidSpec down(std::vector<double>(m.begin(), m.end()));
  TransferReport report{j, down.scaled(j), down, std::nullopt, zero_search(down, cfg), std::nullopt, false};
  const bool down_positive = report.downstairs_search.status == SearchStatus::PositiveOnSearch;
  if (j == 1) {
    report.consistent = down_positive;
    return report;
  }
  report.upstairs_search = zero_search(report.upstairs, cfg);

  // Realize the downstairs minimizer t as Z conj(W) with |Z_k| = |W_k| = sqrt(|t_k|),
  // keeping W off the branch locus.
  constexpr double min_modulus = 1e-3;
  const std::size_t n = down.dim();
  ComplexPoint zd(n), wd(n), z(n);
  std::vector<double> rho_down(n), rho_up(n);
  for (std::size_t k = 0; k < n; ++k) {
    const cplx t = report.downstairs_search.argmin_t[k];
    const double w_mod = std::max(std::sqrt(std::abs(t)), min_modulus);
    wd[k] = w_mod;
    zd[k] = t / w_mod;
    z[k] = std::pow(zd[k], 1.0 / j);
    rho_down[k] = std::abs(zd[k]) * w_mod;
    rho_up[k] = std::abs(z[k]) * std::pow(w_mod, 1.0 / j);
  }

  constexpr double series_tol = 1e-12;
  const AdaptiveSeries up_series = build_series_for_tolerance(report.upstairs, rho_up, series_tol);
  const KernelEvaluator target =
      down.is_ball() ? ball_evaluator(n)
                     : series_evaluator(build_series_for_tolerance(down, rho_down, series_tol).series);
  report.covering = check_bell_covering_law(j, down, z, wd, series_evaluator(up_series.series), target);

  const bool up_positive = report.upstairs_search->status == SearchStatus::PositiveOnSearch;
  report.consistent = down_positive && up_positive && report.covering->residual <= covering_tol;
  return report;
}

RamadanovTable ramadanov_experiment(std::span<const double> m, std::vector<int> j_list,
                                    const std::vector<ComplexPoint>& points, double rel_tol) {
  const EllipsoidSpec base(std::vector<double>(m.begin(), m.end()));
  if (base.dim() != 2) throw DimensionError("ramadanov_experiment: n must be 2");
  if (j_list.empty()) throw std::invalid_argument("ramadanov_experiment: empty j list");
  for (int j : j_list) {
    if (j < 1) throw std::invalid_argument("ramadanov_experiment: j must be >= 1");
  }
  std::sort(j_list.begin(), j_list.end());
  j_list.erase(std::unique(j_list.begin(), j_list.end()), j_list.end());
  for (const ComplexPoint& p : points) require_dim(base, p.size(), "ramadanov_experiment point");

  for (int j : j_list) {
    const EllipsoidSpec spec = base.scaled(j);
    for (const ComplexPoint& p : points) {
      if (!contains(spec, p)) {
        std::ostringstream msg;
        msg << "ramadanov_experiment: test point outside the domain m = (" << to_string(spec) << ")" << " (j = " << j << ")";
        throw DomainError(msg.str());
      }
    }
  }

  RamadanovTable table;
  table.m.assign(m.begin(), m.end());
  table.j_list = j_list;
  for (int j : j_list) {
    const EllipsoidSpec spec = base.scaled(j);
    for (std::size_t pi = 0; pi < points.size(); ++pi) {
      const ComplexPoint& p = points[pi];
      std::vector<double> rho(p.size());
      for (std::size_t k = 0; k < p.size(); ++k) rho[k] = std::norm(p[k]);
      const AdaptiveSeries s = build_series_for_tolerance(spec, rho, rel_tol);
      const EvalResult r = eval_kernel(s.series, p, p);
      RamadanovRow row;
      row.j = j;
      row.point = pi;
      row.p = p;
      row.value = r.value.real();
      row.limit = polydisc_kernel_closed(p, p).real();
      row.abs_diff = std::abs(row.value - row.limit);
      row.rel_diff = row.abs_diff / row.limit;
      row.cap = s.series.cap();
      row.tail_bound = r.tail_bound;
      table.rows.push_back(std::move(row));
    }
  }

  table.eventually_decreasing.assign(points.size(), true);
  const std::size_t np = points.size();
  for (std::size_t pi = 0; pi < np; ++pi) {
    for (std::size_t a = 2; a < j_list.size(); ++a) {
      if (!(table.rows[a * np + pi].abs_diff < table.rows[(a - 1) * np + pi].abs_diff)) {
        table.eventually_decreasing[pi] = false;
      }
    }
  }
  return table;
}

} // namespace bergman
