// Acceptance suite: one pass/fail line per criterion, exit 1 on any failure.
// Tolerances are pinned in code next to each criterion.

#include "oscspec/bounds.hpp"
#include "oscspec/discrete.hpp"
#include "oscspec/divisor.hpp"
#include "oscspec/potential.hpp"
#include "oscspec/prufer.hpp"
#include "oscspec/scanner.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace oscspec;

namespace {

int g_failures = 0;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(int id, const char* name, bool pass, const std::string& detail, double secs) {
  std::printf("[%s] criterion %2d: %-24s %s (%.1fs)\n", pass ? "PASS" : "FAIL", id, name,
              detail.c_str(), secs);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// ---- 1: exact identity suite, J <= 5, >= 100 random rational points ----
void criterion_identities() {
  Timer t;
  auto reports = verify_identities(5, 100, 20240517);
  bool pass = true;
  long rows = 0;
  std::string worst;
  for (const auto& r : reports) {
    if (r.identity == "catalan") continue;
    ++rows;
    if (!r.passed() || r.trials < 100) {
      pass = false;
      worst = r.identity + " J=" + std::to_string(r.J);
    }
  }
  std::string detail = std::to_string(rows) + " identity rows, exact discrepancy 0";
  if (!pass) detail = "failed at " + worst;
  report(1, "identity suite", pass, detail, t.seconds());
}

// ---- 2: Catalan recursion through J = 12 ----
void criterion_catalan() {
  Timer t;
  bool pass = verify_catalan(12);
  report(2, "catalan recursion", pass, "binom(2J,J)/(J+1) vs convolution, J <= 12",
         t.seconds());
}

// ---- 3: route equivalence within 1e-6 on [0, 200] at tol 1e-10 ----
void criterion_route_equivalence() {
  Timer t;
  std::vector<Potential> pots;
  pots.push_back(build_potential({{{1.0, 0.0}, 1.0, Envelope::power_decay(1.0, 1.0)}}, 2, 0.5));
  pots.push_back(build_potential({{{0.4, 0.2}, 1.3, Envelope::exponential(0.8)},
                                  {{0.3, 0.0}, 0.6, Envelope::power_decay(2.0, 1.0)}},
                                 2, 0.5));
  pots.push_back(build_potential(
      {{{0.5, 0.0}, 0.9, Envelope::step_train({2.0, 5.0}, {0.8, 0.3, 0.0})},
       {{0.2, -0.1}, 1.9, Envelope::exponential(0.5)}},
      2, 0.5));
  pots.push_back(build_potential({{{0.7, 0.0}, 0.0, Envelope::exponential(1.0)},
                                  {{0.4, 0.3}, 1.7, Envelope::power_decay(1.5, 1.2)}},
                                 2, 0.5));
  pots.push_back(build_potential({{{0.25, 0.1}, 0.5, Envelope::power_decay(1.0, 1.0)},
                                  {{0.2, 0.0}, 1.2, Envelope::exponential(1.1)},
                                  {{0.15, -0.2}, 2.3, Envelope::exponential(0.6)}},
                                 2, 0.5));

  const double tol = 1e-10, x_max = 200.0, limit = 1e-6;
  std::vector<double> cps;
  for (double x = 0.0; x <= x_max + 1e-12; x += 0.5) cps.push_back(x);

  double worst = 0.0;
  int runs = 0;
  for (const auto& pot : pots) {
    for (int i = 0; i < 20; ++i) {
      double eta = 0.8 + 0.25 * i;
      double theta0 = 0.2;
      PruferTrajectory direct = integrate_prufer(pot, eta, x_max, theta0, tol, cps);
      SolutionTrajectory sol =
          integrate_schrodinger(pot, eta * eta / 4.0, x_max, std::sin(theta0),
                                eta / 2.0 * std::cos(theta0), tol, cps);
      PruferTrajectory recon = prufer_from_solution(sol, eta);
      for (double x : cps)
        worst = std::max(worst, std::fabs(direct.logR_at(x) - recon.logR_at(x)));
      ++runs;
    }
  }
  report(3, "route equivalence", worst <= limit,
         std::to_string(runs) + " runs, max |dlogR| = " + fmt(worst) + " <= 1e-6", t.seconds());
}

// ---- 4: oscillatory integral bound, 50 random configurations ----
void criterion_osc_bound() {
  Timer t;
  std::mt19937_64 rng(1123);
  std::uniform_real_distribution<double> camp(0.1, 0.8), freq(0.2, 2.5), ed(0.5, 5.0);
  std::uniform_real_distribution<double> ad(0.0, 5.0), len(5.0, 50.0);
  double worst_excess = -1.0;
  bool pass = true;
  for (int trial = 0; trial < 50; ++trial) {
    Envelope e1 = (rng() & 1) ? Envelope::power_decay(1.0, 1.0) : Envelope::exponential(0.9);
    Envelope e2 = (rng() & 1) ? Envelope::power_decay(2.0, 1.3)
                              : Envelope::step_train({3.0, 8.0}, {0.9, 0.4, 0.0});
    Potential pot = build_potential(
        {{{camp(rng), 0.0}, freq(rng), e1}, {{camp(rng), camp(rng)}, freq(rng), e2}}, 2, 0.5);
    std::uniform_int_distribution<int> idx(0, static_cast<int>(pot.terms().size()) - 1);
    std::uniform_int_distribution<int> jd(1, 3);
    int J = jd(rng);
    std::vector<int> tuple(J);
    for (auto& m : tuple) m = idx(rng);
    std::uniform_int_distribution<int> kd(0, J);
    double a = ad(rng), b = a + len(rng);
    OscBoundResult r = osc_integral_bound_check(pot, tuple, kd(rng), ed(rng), a, b, 1e-9);
    worst_excess = std::max(worst_excess, r.lhs - r.rhs);
    if (!(r.lhs <= r.rhs + 1e-8)) pass = false;
  }
  report(4, "oscillatory bound", pass, "50 configs, max(lhs - rhs) = " + fmt(worst_excess),
         t.seconds());
}

// ---- 5: absolute-sum envelope bound with the hand equality case ----
void criterion_envelope_bound() {
  Timer t;
  bool pass = true;
  std::string detail;

  Potential eq = make_potential_unchecked(
      {{{0.5, 0.0}, 1.0, Envelope::exponential(1.0)}}, 2, 0.5);
  EnvelopeBoundPair pr = script_S_envelope(eq, 2, 2, 2.0, 0.0);
  if (std::fabs(pr.lhs - 1.0 / 16.0) > 1e-12 || std::fabs(pr.rhs - 1.0 / 16.0) > 1e-12)
    pass = false;

  std::mt19937_64 rng(88);
  std::uniform_real_distribution<double> camp(0.1, 0.5), freq(0.3, 2.6), ed(0.6, 5.0);
  std::uniform_real_distribution<double> xd(0.0, 8.0);
  double worst_ratio = 0.0;
  for (int ip = 0; ip < 3; ++ip) {
    Potential pot = build_potential(
        {{{camp(rng), camp(rng) - 0.25}, freq(rng), Envelope::power_decay(1.0, 1.0)},
         {{camp(rng), 0.0}, freq(rng), Envelope::exponential(0.8)}},
        3, 0.4);
    for (int i = 0; i < 20; ++i) {
      double x = xd(rng), eta = ed(rng);
      for (int J = 2; J <= 3; ++J)
        for (int K = 0; K <= J; ++K) {
          EnvelopeBoundPair r = script_S_envelope(pot, J, K, eta, x);
          if (!r.finite) continue;
          if (r.rhs > 0.0) worst_ratio = std::max(worst_ratio, r.lhs / r.rhs);
          if (!(r.lhs <= r.rhs * (1.0 + 1e-12))) pass = false;
        }
    }
  }
  detail = "equality case 1/16 exact; max lhs/rhs = " + fmt(worst_ratio);
  report(5, "envelope bound", pass, detail, t.seconds());
}

// ---- 6: the assembled amplitude bound dominates measured growth ----
void criterion_total_bound() {
  Timer t;
  std::mt19937_64 rng(4096);
  std::uniform_real_distribution<double> camp(0.05, 0.3), freq(0.4, 2.8), rate(0.6, 1.6);
  std::uniform_real_distribution<double> ed(1.2, 6.0);
  bool pass = true;
  double worst_margin = 1e300;
  int runs = 0;
  for (int ip = 0; ip < 10; ++ip) {
    int n_terms = 1 + (ip % 2);
    std::vector<Term> terms;
    for (int i = 0; i < n_terms; ++i) {
      Envelope env = (rng() & 1) ? Envelope::power_decay(1.0, rate(rng))
                                 : Envelope::exponential(rate(rng));
      terms.push_back({{camp(rng), camp(rng) - 0.15}, freq(rng), env});
    }
    Potential pot = build_potential(std::move(terms), 2, 0.5);

    for (int ie = 0; ie < 10; ++ie) {
      double eta;
      BoundBreakdown bb;
      for (;;) {
        eta = ed(rng);
        double dist = 1e300;
        for (const auto& tm : pot.terms()) dist = std::min(dist, std::fabs(eta - std::fabs(tm.phi)));
        if (dist < 0.3) continue;
        bb = total_bound(pot, eta, 0.0);
        if (bb.finite) break;
      }
      double measured = 0.0;
      for (double theta0 : {0.0, M_PI / 2.0}) {
        PruferTrajectory tr = integrate_prufer(pot, eta, 500.0, theta0, 1e-9);
        double lo = 1e300, hi = -1e300;
        for (const auto& s : tr.samples) {
          lo = std::min(lo, s.logR);
          hi = std::max(hi, s.logR);
        }
        measured = std::max(measured, hi - lo);
      }
      worst_margin = std::min(worst_margin, bb.total - measured);
      if (!(measured <= bb.total + 1e-6)) pass = false;
      ++runs;
    }
  }
  report(6, "amplitude bound", pass,
         std::to_string(runs) + " (pot, eta) runs, min(total - measured) = " + fmt(worst_margin),
         t.seconds());
}

// ---- 7: resonance localization at cap 1e3, grid 2048 ----
void criterion_resonance() {
  Timer t;
  Potential pot =
      build_potential({{{3.0, 0.0}, 1.0, Envelope::power_decay(1.0, 1.0)}}, 3, 0.4);
  ScanParams params;
  params.eta_min = 0.5;
  params.eta_max = 2.5;
  params.n_grid = 2048;
  params.x_max = 1000.0;
  params.growth_threshold = 0.8;
  params.divergence_cap = 1e3;
  params.tol = 1e-6;
  params.threads = 0;
  ScanReport rep = scan_energies(pot, params);

  const double step = (params.eta_max - params.eta_min) / (params.n_grid - 1);
  // h_1 pole at eta = 1; h_2 prefix-sum poles add eta = 2 inside the window
  const std::vector<double> poles{1.0, 2.0};

  bool contains_resonance = false;
  bool all_near_poles = true;
  double far = 0.0;
  int n_flagged = 0;
  for (const auto& p : rep.points) {
    if (!p.flagged) continue;
    ++n_flagged;
    double dist = 1e300;
    for (double q : poles) dist = std::min(dist, std::fabs(p.eta - q));
    if (std::fabs(p.eta - 1.0) <= 2.0 * step) contains_resonance = true;
    far = std::max(far, dist / step);
    if (dist > 10.0 * step + 1e-12) all_near_poles = false;
  }
  bool pass = contains_resonance && all_near_poles && n_flagged > 0;
  report(7, "resonance localization", pass,
         std::to_string(n_flagged) + " flagged points, farthest " + fmt(far) +
             " grid steps from a pole",
         t.seconds());
}

// ---- 8: Holder integral bound over a 101-point psi grid ----
void criterion_holder() {
  Timer t;
  std::vector<double> psis(101);
  for (int i = 0; i < 101; ++i) psis[i] = i / 100.0;
  bool pass = true;
  std::string detail;
  for (double alpha : {0.25, 0.5, 0.75}) {
    HolderResult r = holder_check(alpha, psis, 15);
    if (!(r.max_integral <= r.bound + 1e-6)) pass = false;
    if (std::fabs(r.max_integral - r.bound) > 1e-6) pass = false;  // attained at psi = 1/2
    detail += "a=" + fmt(alpha) + ":" + fmt(r.bound - r.max_integral) + " ";
  }
  report(8, "holder bound", pass, "bound - max: " + detail, t.seconds());
}

// ---- 9: box-counting sanity ----
void criterion_box_counting() {
  Timer t;
  bool pass = true;

  std::vector<double> scales{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  DimensionEstimate empty = box_counting_dim(std::span<const double>{}, scales);
  if (!empty.degenerate || empty.slope != 0.0) pass = false;

  std::vector<double> dense(20001);
  for (std::size_t i = 0; i < dense.size(); ++i) dense[i] = i / 20000.0;
  DimensionEstimate full = box_counting_dim(std::span<const double>(dense), scales);
  if (std::fabs(full.slope - 1.0) > 0.05) pass = false;

  std::vector<std::pair<double, double>> cantor{{0.0, 1.0}};
  for (int level = 0; level < 6; ++level) {
    std::vector<std::pair<double, double>> next;
    for (auto& [lo, hi] : cantor) {
      double len = (hi - lo) / 3.0;
      next.emplace_back(lo, lo + len);
      next.emplace_back(hi - len, hi);
    }
    cantor = std::move(next);
  }
  std::vector<double> tri;
  for (int k = 1; k <= 6; ++k) tri.push_back(std::pow(3.0, -k));
  DimensionEstimate cd = box_counting_dim(std::span<const std::pair<double, double>>(cantor), tri);
  if (std::fabs(cd.slope - 0.631) > 0.05) pass = false;

  report(9, "box counting", pass,
         "empty=0, dense=" + fmt(full.slope) + ", cantor=" + fmt(cd.slope), t.seconds());
}

// ---- 10: Szego oracle for OPUC ----
void criterion_szego() {
  Timer t;
  CoeffSequence zeros = CoeffSequence::opuc(std::vector<std::complex<double>>(200, {0.0, 0.0}));
  double zero_dev = szego_compare(zeros, 1.234, 200);
  bool pass = zero_dev == 0.0;

  std::mt19937_64 rng(31415);
  std::uniform_real_distribution<double> mag(0.0, 0.8), ang(0.0, 2.0 * M_PI), ed(0.2, 6.0);
  double worst = 0.0;
  for (int seed = 0; seed < 20; ++seed) {
    std::vector<std::complex<double>> alphas(200);
    for (auto& a : alphas) a = std::polar(mag(rng), ang(rng));
    CoeffSequence seq = CoeffSequence::opuc(std::move(alphas));
    double dev = szego_compare(seq, ed(rng), 200);
    worst = std::max(worst, dev);
    if (!(dev <= 1e-9)) pass = false;
  }
  report(10, "szego oracle", pass,
         "alpha=0 dev " + fmt(zero_dev) + ", 20 seeds max dev " + fmt(worst), t.seconds());
}

// ---- 11: discrete telescoping sum bound ----
void criterion_discrete_sum() {
  Timer t;
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> camp(0.0, 0.25), freq(0.1, 2.9), ed(0.2, 6.0);
  bool pass = true;
  double worst_ratio = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<DiscreteTerm> terms;
    for (int i = 0; i < 2; ++i) {
      Envelope env = (rng() & 1) ? Envelope::power_decay(1.0 + i, 1.0)
                                 : Envelope::exponential(0.05 + 0.15 * i);
      terms.push_back({{camp(rng), camp(rng)}, freq(rng), env});
    }
    CoeffSequence seq = CoeffSequence::opuc_structured(terms, 4000);
    std::uniform_int_distribution<int> pick(0, 1), kd(0, 2), md(0, 40);
    std::vector<int> plus{pick(rng)};
    std::vector<int> minus;
    if (rng() & 1) minus.push_back(pick(rng));
    int M = md(rng);
    int N = M + 500 + static_cast<int>(rng() % 3000);
    SumBoundResult r = discrete_sum_bound_check(seq, plus, minus, kd(rng), ed(rng), M, N);
    if (r.rhs > 0.0) worst_ratio = std::max(worst_ratio, r.lhs / r.rhs);
    if (!(r.lhs <= r.rhs + 1e-10)) pass = false;
  }
  report(11, "discrete sum bound", pass, "30 configs, max lhs/rhs = " + fmt(worst_ratio),
         t.seconds());
}

// ---- 12: unimodularity of the phase ratio ----
void criterion_unimodular() {
  Timer t;
  std::mt19937_64 rng(161803);
  std::uniform_real_distribution<double> mag(0.0, 0.999), ang(0.0, 2.0 * M_PI), ed(0.0, 12.0);
  double worst = 0.0;
  long tested = 0;
  while (tested < 100000) {
    std::complex<double> alpha = std::polar(mag(rng), ang(rng));
    int c = (rng() & 1) ? 1 : 0;
    double theta = ang(rng), eta = ed(rng);
    int n = static_cast<int>(rng() % 1000);
    double psi = (n + 1) * eta + 2.0 * theta;
    std::complex<double> w = std::polar(1.0, psi);
    std::complex<double> cd{static_cast<double>(c), 0.0};
    std::complex<double> den = 1.0 - alpha * w - cd * std::conj(alpha);
    if (std::abs(den) < 1e-9) continue;  // ratio undefined at the circle boundary
    std::complex<double> num = 1.0 - std::conj(alpha) * std::conj(w) - cd * alpha;
    worst = std::max(worst, std::fabs(std::abs(num / den) - 1.0));
    ++tested;
  }
  report(12, "phase unimodularity", worst <= 1e-15,
         "1e5 samples, max |mod - 1| = " + fmt(worst), t.seconds());
}

// ---- 13: almost-periodic window bounds for cos x over a period ----
void criterion_window() {
  Timer t;
  Potential pot = build_potential(
      {{{0.5, 0.0}, 1.0, Envelope::exponential(1.0)},
       {{0.5, 0.0}, -1.0, Envelope::exponential(1.0)}},
      2, 0.5);
  WindowBounds wb = ap_window_bounds(pot, 2.0 * M_PI, 8.0, 0.5);
  bool pass = std::fabs(wb.delta - 4.0) <= 1e-6 && std::fabs(wb.Delta - 4.0) <= 1e-6;
  report(13, "window bounds", pass,
         "delta = " + fmt(wb.delta) + ", Delta = " + fmt(wb.Delta) + " (target 4)", t.seconds());
}

}  // namespace

int main() {
  Timer total;
  criterion_identities();
  criterion_catalan();
  criterion_route_equivalence();
  criterion_osc_bound();
  criterion_envelope_bound();
  criterion_total_bound();
  criterion_resonance();
  criterion_holder();
  criterion_box_counting();
  criterion_szego();
  criterion_discrete_sum();
  criterion_unimodular();
  criterion_window();
  std::printf("%s: %d criteria failed (%.1fs total)\n", g_failures ? "FAIL" : "OK", g_failures,
              total.seconds());
  return g_failures ? 1 : 0;
}
