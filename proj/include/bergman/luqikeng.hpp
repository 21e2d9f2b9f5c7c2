#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bergman/ellipsoid.hpp"
#include "bergman/kernel.hpp"
#include "bergman/transforms.hpp"

namespace bergman {

/// Attainable moduli (|z_1 conj(w_1)|, ..., |z_n conj(w_n)|) for z, w in the
/// domain: {rho >= 0 : sum_k rho_k^{m_k} < 1}.
class ModuliRegion {
public:
  explicit ModuliRegion(EllipsoidSpec spec) : spec_(std::move(spec)) {}

  const EllipsoidSpec& spec() const { return spec_; }
  double level(std::span<const double> rho) const;
  bool contains(std::span<const double> rho) const;
  /// rho / (1 - delta) still lies in the region.
  bool contains_shrunk(std::span<const double> rho, double delta) const;
  /// Largest lambda in (0, 1] with level(lambda * rho / (1 - delta)) <= 1.
  double boundary_scale(std::span<const double> rho, double delta) const;

private:
  EllipsoidSpec spec_;
};

ModuliRegion achievable_moduli(const EllipsoidSpec& spec);

struct SearchConfig {
  int cap = 60;
  std::size_t starts = 64;
  std::uint64_t seed = 1;
  /// Objective evaluations per local search (restarts included).
  std::size_t max_iters = 3000;
  double x_tol = 1e-12;
  double f_tol = 1e-32;
  /// Search region is {rho : rho / (1 - delta) attainable}.
  double delta = 0.25;
  /// ZeroFound threshold, relative to c_0 = 1 / volume.
  double zero_threshold_rel = 1e-10;

  void validate() const;
};

enum class SearchStatus { ZeroFound, PositiveOnSearch, Uncertified };

std::string to_string(SearchStatus status);

struct StartResult {
  std::size_t index = 0;
  double min_abs = 0.0;
  std::vector<cplx> argmin_t;
  std::size_t evaluations = 0;
};

struct SearchReport {
  double min_abs = 0.0;
  std::vector<cplx> argmin_t;
  std::size_t evaluations = 0;
  SearchStatus status = SearchStatus::Uncertified;
  /// min_abs - error_bound; positive only for PositiveOnSearch.
  double margin = 0.0;
  /// Tail plus rounding bound at argmin_t (infinite when no tail bound holds).
  double error_bound = 0.0;
  double zero_threshold = 0.0;
  std::size_t best_start = 0;
  int cap = 0;
  std::vector<StartResult> starts;
};

/// Multistart simplex search for zeros of F(t) = sum c_alpha t^alpha over
/// t_k = rho_k e^{i theta_k}, rho in the shrunk attainable region. A
/// PositiveOnSearch status is numerical evidence only; ZeroFound is a
/// certificate up to the reported error bound.
SearchReport zero_search(const EllipsoidSpec& spec, const SearchConfig& cfg);
SearchReport zero_search(const KernelSeries& series, const SearchConfig& cfg);

/// Disc-kernel coefficients with the degree-1 sign reversed; F has zeros at the
/// roots of 4t^3 - 8t^2 + 4t - 1 inside the unit disc.
KernelSeries doctored_disc_series(int cap);

struct TransferReport {
  int j = 1;
  EllipsoidSpec upstairs;
  EllipsoidSpec downstairs;
  /// Search on the covering domain (empty for j = 1).
  std::optional<SearchReport> upstairs_search;
  SearchReport downstairs_search;
  /// Covering identity at the downstairs minimizer (empty for j = 1).
  std::optional<CoveringCheck> covering;
  /// Both searches positive and the covering residual within tolerance.
  bool consistent = false;
};

/// Searches the covering domain Omega_{j m} and the target Omega_m, then checks the
/// covering identity at points realizing the downstairs minimizer.
TransferReport zero_transfer_experiment(std::span<const double> m, int j, const SearchConfig& cfg,
                                        double covering_tol = 1e-6);

struct RamadanovRow {
  int j = 1;
  std::size_t point = 0;
  ComplexPoint p;
  double value = 0.0;
  double limit = 0.0;
  double abs_diff = 0.0;
  double rel_diff = 0.0;
  int cap = 0;
  double tail_bound = 0.0;
};

struct RamadanovTable {
  std::vector<double> m;
  std::vector<int> j_list;
  std::vector<RamadanovRow> rows;
  /// Per test point: differences decrease from the second listed j on.
  std::vector<bool> eventually_decreasing;
};

/// K_j(p,p) on Omega_{j m} against the bidisc limit prod_k 1/(pi (1 - |p_k|^2)^2).
RamadanovTable ramadanov_experiment(std::span<const double> m, std::vector<int> j_list,
                                    const std::vector<ComplexPoint>& points, double rel_tol = 1e-13);

} // namespace bergman
