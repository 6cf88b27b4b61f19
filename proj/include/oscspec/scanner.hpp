#pragma once

// Energy-grid scans: growth statistics of the Prufer amplitude over the tail
// window [x_max/2, x_max] with two theta0 probes, divergence flags of the
// small-divisor sums, box-counting dimension estimation of flagged sets, and
// the Holder integral check
//     max_psi integral_0^1 |eta - psi|^(-alpha) d eta <= 2^alpha / (1 - alpha).
//
// Box counting upper-bounds Hausdorff dimension and is the desk-scale proxy;
// grid resolution limits what a scan can resolve and are echoed in outputs.

#include "oscspec/bounds.hpp"
#include "oscspec/potential.hpp"

#include <span>
#include <utility>
#include <vector>

namespace oscspec {

struct ScanPoint {
  double eta = 0.0;
  double growth_stat = 0.0;      // max over probes of sup tail |logR - logR(mid)|
  unsigned divergent_flags = 0;  // bit j-1 set when the j-tuple sum is >= cap or infinite
  double bound_value = 0.0;      // total_bound at a = 0 (inf when not finite)
  bool bound_finite = true;
  bool flagged = false;
  bool integrator_ok = true;
};

struct ScanParams {
  double eta_min = 0.5;
  double eta_max = 2.5;
  int n_grid = 2048;
  double x_max = 500.0;
  double growth_threshold = 1.0;
  double divergence_cap = 1e3;
  double tol = 1e-10;
  int threads = 0;  // 0: hardware concurrency
};

struct ScanReport {
  ScanParams params;
  std::vector<ScanPoint> points;
  std::vector<std::pair<double, double>> flagged_intervals;  // disjoint, sorted
};

ScanReport scan_energies(const Potential& pot, const ScanParams& params);

// Maximal grid runs where the j-tuple small-divisor sum is >= cap or infinite.
std::vector<std::pair<double, double>> divergence_set(const Potential& pot, int j,
                                                      std::span<const double> eta_grid,
                                                      double cap);

struct DimensionEstimate {
  std::vector<double> scales;
  std::vector<long> counts;
  double slope = 0.0;            // clamped to [0, 1]
  double confidence_width = 0.0; // standard error of the fitted slope
  bool degenerate = false;       // empty set: slope 0 by convention
};

DimensionEstimate box_counting_dim(std::span<const std::pair<double, double>> intervals,
                                   std::span<const double> scales);
DimensionEstimate box_counting_dim(std::span<const double> points, std::span<const double> scales);

struct HolderResult {
  double max_integral = 0.0;
  double bound = 0.0;  // 2^alpha / (1 - alpha), attained at psi = 1/2
  double argmax_psi = 0.0;
};

HolderResult holder_check(double alpha, std::span<const double> psi_grid, int n_quad);

}  // namespace oscspec
