#include "oscspec/scanner.hpp"

#include "oscspec/prufer.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <thread>

namespace oscspec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> make_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  return g;
}

ScanPoint scan_one(const Potential& pot, double eta, const ScanParams& p) {
  ScanPoint pt;
  pt.eta = eta;

  for (int j = 1; j <= pot.p() - 1; ++j) {
    SumValue s = small_divisor_sum(pot, j, eta);
    if (!s.finite || s.value >= p.divergence_cap) pt.divergent_flags |= 1u << (j - 1);
  }

  BoundBreakdown bb = total_bound(pot, eta, 0.0);
  pt.bound_value = bb.total;
  pt.bound_finite = bb.finite;

  const double x_mid = p.x_max / 2.0;
  const std::array<double, 1> cps{x_mid};
  pt.growth_stat = 0.0;
  for (double theta0 : {0.0, M_PI / 2.0}) {
    try {
      PruferTrajectory traj = integrate_prufer(pot, eta, p.x_max, theta0, p.tol, cps);
      pt.growth_stat = std::max(pt.growth_stat, traj.tail_sup(x_mid));
    } catch (const StepFailure&) {
      pt.integrator_ok = false;
    }
  }

  pt.flagged = pt.integrator_ok &&
               (pt.growth_stat > p.growth_threshold || pt.divergent_flags != 0);
  return pt;
}

}  // namespace

ScanReport scan_energies(const Potential& pot, const ScanParams& params) {
  if (!(params.eta_min > 0.0) || !(params.eta_min < params.eta_max))
    throw std::invalid_argument("scan_energies: need 0 < eta_min < eta_max");
  if (params.n_grid < 2) throw std::invalid_argument("scan_energies: n_grid >= 2 required");

  ScanReport report;
  report.params = params;
  std::vector<double> grid = make_grid(params.eta_min, params.eta_max, params.n_grid);
  report.points.resize(grid.size());

  unsigned hw = std::thread::hardware_concurrency();
  unsigned n_threads = params.threads > 0 ? static_cast<unsigned>(params.threads)
                                          : std::max(1u, hw);
  n_threads = std::min<unsigned>(n_threads, grid.size());

  if (n_threads <= 1) {
    for (std::size_t i = 0; i < grid.size(); ++i)
      report.points[i] = scan_one(pot, grid[i], params);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (unsigned t = 0; t < n_threads; ++t) {
      pool.emplace_back([&] {
        for (;;) {
          std::size_t i = next.fetch_add(1);
          if (i >= grid.size()) break;
          report.points[i] = scan_one(pot, grid[i], params);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  const double step = (params.eta_max - params.eta_min) / (params.n_grid - 1);
  for (std::size_t i = 0; i < report.points.size();) {
    if (!report.points[i].flagged) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < report.points.size() && report.points[j + 1].flagged) ++j;
    report.flagged_intervals.emplace_back(report.points[i].eta - step / 2.0,
                                          report.points[j].eta + step / 2.0);
    i = j + 1;
  }
  return report;
}

std::vector<std::pair<double, double>> divergence_set(const Potential& pot, int j,
                                                      std::span<const double> eta_grid,
                                                      double cap) {
  if (j < 1 || j > pot.p() - 1) throw std::invalid_argument("divergence_set: need 1 <= j <= p-1");
  if (!(cap > 0.0)) throw std::invalid_argument("divergence_set: cap > 0 required");
  std::vector<std::pair<double, double>> intervals;
  std::size_t i = 0;
  auto diverges = [&](double eta) {
    SumValue s = small_divisor_sum(pot, j, eta);
    return !s.finite || s.value >= cap;
  };
  while (i < eta_grid.size()) {
    if (!diverges(eta_grid[i])) {
      ++i;
      continue;
    }
    std::size_t k = i;
    while (k + 1 < eta_grid.size() && diverges(eta_grid[k + 1])) ++k;
    intervals.emplace_back(eta_grid[i], eta_grid[k]);
    i = k + 1;
  }
  return intervals;
}

namespace {

DimensionEstimate fit_dimension(std::vector<double> scales, std::vector<long> counts) {
  DimensionEstimate est;
  est.scales = std::move(scales);
  est.counts = std::move(counts);
  bool empty = std::all_of(est.counts.begin(), est.counts.end(), [](long c) { return c == 0; });
  if (empty) {
    est.degenerate = true;
    est.slope = 0.0;
    return est;
  }
  const std::size_t n = est.scales.size();
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = std::log(1.0 / est.scales[i]);
    ys[i] = std::log(static_cast<double>(std::max<long>(est.counts[i], 1)));
  }
  double xbar = 0, ybar = 0;
  for (std::size_t i = 0; i < n; ++i) {
    xbar += xs[i];
    ybar += ys[i];
  }
  xbar /= n;
  ybar /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - xbar) * (xs[i] - xbar);
    sxy += (xs[i] - xbar) * (ys[i] - ybar);
  }
  double slope = sxy / sxx;
  double ss_res = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = ys[i] - ybar - slope * (xs[i] - xbar);
    ss_res += r * r;
  }
  est.slope = std::clamp(slope, 0.0, 1.0);
  est.confidence_width = n > 2 ? std::sqrt(ss_res / (n - 2) / sxx) : 0.0;
  return est;
}

void validate_scales(std::span<const double> scales) {
  if (scales.size() < 3) throw std::invalid_argument("box_counting_dim: >= 3 scales required");
  double lo = kInf, hi = 0.0;
  for (double s : scales) {
    if (!(s > 0.0)) throw std::invalid_argument("box_counting_dim: scales must be positive");
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  if (hi / lo < 100.0)
    throw std::invalid_argument("box_counting_dim: scales must span >= 2 decades");
}

}  // namespace

DimensionEstimate box_counting_dim(std::span<const std::pair<double, double>> intervals,
                                   std::span<const double> scales) {
  validate_scales(scales);
  std::vector<double> sc(scales.begin(), scales.end());
  std::sort(sc.begin(), sc.end());
  std::vector<long> counts;
  for (double eps : sc) {
    std::set<long> boxes;
    for (const auto& [lo, hi] : intervals) {
      if (!(hi > lo)) continue;
      long b0 = static_cast<long>(std::floor(lo / eps));
      long b1 = static_cast<long>(std::floor(hi / eps));
      // intervals are half-open: an endpoint exactly on a grid line does not
      // occupy the next box
      if (b1 > b0 && b1 * eps == hi) --b1;
      for (long b = b0; b <= b1; ++b) boxes.insert(b);
    }
    counts.push_back(static_cast<long>(boxes.size()));
  }
  return fit_dimension(std::move(sc), std::move(counts));
}

DimensionEstimate box_counting_dim(std::span<const double> points,
                                   std::span<const double> scales) {
  validate_scales(scales);
  std::vector<double> sc(scales.begin(), scales.end());
  std::sort(sc.begin(), sc.end());
  std::vector<long> counts;
  for (double eps : sc) {
    std::set<long> boxes;
    for (double p : points) boxes.insert(static_cast<long>(std::floor(p / eps)));
    counts.push_back(static_cast<long>(boxes.size()));
  }
  return fit_dimension(std::move(sc), std::move(counts));
}

HolderResult holder_check(double alpha, std::span<const double> psi_grid, int n_quad) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("holder_check: alpha in (0,1) required");
  if (psi_grid.empty()) throw std::invalid_argument("holder_check: psi grid empty");
  if (n_quad < 3) n_quad = 3;

  boost::math::quadrature::tanh_sinh<double> quad(static_cast<std::size_t>(n_quad));
  HolderResult out;
  out.bound = std::pow(2.0, alpha) / (1.0 - alpha);
  out.max_integral = -kInf;
  // two-argument integrands: xc > 0 carries b - x, xc < 0 carries -(x - a),
  // so the distance to a singular endpoint never cancels to zero
  auto piece = [&](double lo, double hi, double psi) {
    auto f = [&](double x, double xc) {
      double u;
      if (psi == hi && xc > 0.0)
        u = xc;
      else if (psi == lo && xc < 0.0)
        u = -xc;
      else
        u = std::fabs(x - psi);
      return std::pow(u, -alpha);
    };
    return quad.integrate(f, lo, hi, 1e-9);
  };
  for (double psi : psi_grid) {
    double v;
    if (psi > 0.0 && psi < 1.0) {
      // split at the integrable singularity
      v = piece(0.0, psi, psi) + piece(psi, 1.0, psi);
    } else {
      v = piece(0.0, 1.0, psi);
    }
    if (v > out.max_integral) {
      out.max_integral = v;
      out.argmax_psi = psi;
    }
  }
  return out;
}

}  // namespace oscspec
