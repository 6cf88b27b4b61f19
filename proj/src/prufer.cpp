#include "oscspec/prufer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <sstream>

namespace oscspec {

namespace {

std::string at_msg(const char* what, double x) {
  std::ostringstream os;
  os << what << " at x=" << x;
  return os.str();
}

}  // namespace

StepFailure::StepFailure(double where) : std::runtime_error(at_msg("step size underflow", where)), x(where) {}
DegenerateState::DegenerateState(double where)
    : std::runtime_error(at_msg("(u, u') = (0, 0)", where)), x(where) {}

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

template <std::size_t N>
using State = std::array<double, N>;

// Adaptive DP5(4) with error-per-unit-step control, hard step cap, exact
// landing on checkpoints, and an acceptance veto (used to keep theta
// increments on the continuous branch). FSAL is exploited across accepted
// steps.
template <std::size_t N, class Rhs, class OnAccept, class Veto>
IntegratorDiagnostics integrate_dp5(Rhs&& rhs, State<N>& y, double x0, double x1, double tol,
                                    double hmax, std::span<const double> checkpoints,
                                    OnAccept&& on_accept, Veto&& veto) {
  IntegratorDiagnostics diag;
  double x = x0;
  std::size_t next_cp = 0;
  while (next_cp < checkpoints.size() && checkpoints[next_cp] <= x0) ++next_cp;

  State<N> k1, k2, k3, k4, k5, k6, k7, yt, y5;
  rhs(x, y, k1);
  double h_work = std::min(hmax, 1e-3);
  on_accept(x, y);

  while (x < x1) {
    if (h_work < 1e-14 * std::max(1.0, std::fabs(x))) throw StepFailure(x);
    double target = x1;
    if (next_cp < checkpoints.size()) target = std::min(target, checkpoints[next_cp]);
    double h = std::min(h_work, target - x);
    bool clipped = h < h_work;

    // a clipped step may end exactly on a discontinuity of the right-hand
    // side (checkpoints include envelope breakpoints); evaluating the
    // endpoint stages one ulp to the left keeps the step on the smooth piece
    const double xcap = clipped ? std::nextafter(target, x) : target;
    auto stage_x = [&](double c) {
      double xs = x + c * h;
      return xs > xcap ? xcap : xs;
    };

    for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * a21 * k1[i];
    rhs(stage_x(c2), yt, k2);
    for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(stage_x(c3), yt, k3);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(stage_x(c4), yt, k4);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(stage_x(c5), yt, k5);
    for (std::size_t i = 0; i < N; ++i)
      yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    rhs(stage_x(1.0), yt, k6);
    for (std::size_t i = 0; i < N; ++i)
      y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    rhs(stage_x(1.0), y5, k7);

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      double d = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      err = std::max(err, std::fabs(d) / std::max(1.0, std::fabs(y[i])));
    }

    bool accept = err <= tol * h && veto(y, y5);
    if (accept) {
      ++diag.accepted;
      diag.max_local_error = std::max(diag.max_local_error, h > 0 ? err / h : 0.0);
      x = clipped ? target : x + h;  // land checkpoints exactly
      y = y5;
      if (clipped)
        rhs(x, y, k1);  // re-evaluate on the right side of a possible jump
      else
        k1 = k7;  // FSAL
      if (next_cp < checkpoints.size() && x >= checkpoints[next_cp]) ++next_cp;
      on_accept(x, y);
    } else {
      ++diag.rejected;
    }

    double fac = err > 0.0 ? 0.9 * std::pow(tol * h / err, 0.25) : 5.0;
    fac = std::clamp(fac, 0.2, accept ? 5.0 : 1.0);
    double h_new = std::min(h * fac, hmax);
    // steps clipped to a checkpoint leave the controller alone unless the
    // error forced a rejection
    if (!clipped)
      h_work = h_new;
    else if (!accept)
      h_work = std::min(h_work, h_new);
    if (h_work <= 0.0 || !std::isfinite(h_work)) throw StepFailure(x);
  }
  return diag;
}

double prufer_hmax(double eta) { return 0.1 * std::min(1.0, 2.0 * M_PI / std::fabs(eta)); }

}  // namespace

namespace {

// Step-train envelopes make V(x) jump; landing a step on each breakpoint
// keeps every integration step on a smooth piece (envelopes are
// right-continuous).
std::vector<double> merge_checkpoints(const Potential& pot, double x_max,
                                      std::span<const double> user) {
  std::vector<double> cps(user.begin(), user.end());
  for (const auto& t : pot.terms())
    for (double b : t.envelope.breakpoints())
      if (b > 0.0 && b < x_max) cps.push_back(b);
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  return cps;
}

}  // namespace

double PruferTrajectory::logR_at(double x) const {
  auto it = std::lower_bound(samples.begin(), samples.end(), x,
                             [](const PruferSample& s, double v) { return s.x < v; });
  if (it == samples.end() || std::fabs(it->x - x) > 1e-9)
    throw std::invalid_argument("logR_at: x is not a recorded sample point");
  return it->logR;
}

double PruferTrajectory::tail_sup(double x_mid) const {
  auto it = std::lower_bound(samples.begin(), samples.end(), x_mid,
                             [](const PruferSample& s, double v) { return s.x < v; });
  if (it == samples.end()) return 0.0;
  double base = it->logR;
  double sup = 0.0;
  for (; it != samples.end(); ++it) sup = std::max(sup, std::fabs(it->logR - base));
  return sup;
}

PruferTrajectory integrate_prufer(const Potential& pot, double eta, double x_max, double theta0,
                                  double tol, std::span<const double> checkpoints) {
  if (!(eta > 0.0)) throw std::invalid_argument("integrate_prufer: eta > 0 required");
  if (!(x_max > 0.0)) throw std::invalid_argument("integrate_prufer: x_max > 0 required");
  if (!(tol > 0.0)) throw std::invalid_argument("integrate_prufer: tol > 0 required");

  PruferTrajectory traj;
  traj.eta = eta;
  traj.theta0 = theta0;
  traj.tol = tol;

  auto rhs = [&](double x, const State<2>& y, State<2>& dy) {
    double V = pot.value(x);
    double xi = eta * x + 2.0 * y[0];
    double w = V / eta;
    dy[0] = w * (std::cos(xi) - 1.0);
    dy[1] = w * std::sin(xi);
  };
  auto veto = [](const State<2>& before, const State<2>& after) {
    return std::fabs(after[0] - before[0]) <= M_PI / 2.0;
  };

  State<2> y{theta0, 0.0};
  traj.samples.reserve(4096);
  std::vector<double> cps = merge_checkpoints(pot, x_max, checkpoints);
  traj.diag = integrate_dp5<2>(
      rhs, y, 0.0, x_max, tol, prufer_hmax(eta), cps,
      [&](double x, const State<2>& s) { traj.samples.push_back({x, s[1], s[0]}); }, veto);
  return traj;
}

SolutionTrajectory integrate_schrodinger(const Potential& pot, double E, double x_max, double u0,
                                         double du0, double tol,
                                         std::span<const double> checkpoints) {
  if (u0 == 0.0 && du0 == 0.0)
    throw std::invalid_argument("integrate_schrodinger: (u0, du0) must be nontrivial");
  if (!(x_max > 0.0) || !(tol > 0.0))
    throw std::invalid_argument("integrate_schrodinger: x_max, tol > 0 required");

  SolutionTrajectory traj;
  traj.E = E;
  auto rhs = [&](double x, const State<2>& y, State<2>& dy) {
    dy[0] = y[1];
    dy[1] = (pot.value(x) - E) * y[0];
  };
  double eta = 2.0 * std::sqrt(std::max(E, 1e-12));
  State<2> y{u0, du0};
  traj.samples.reserve(4096);
  std::vector<double> cps = merge_checkpoints(pot, x_max, checkpoints);
  traj.diag = integrate_dp5<2>(
      rhs, y, 0.0, x_max, tol, prufer_hmax(eta), cps,
      [&](double x, const State<2>& s) { traj.samples.push_back({x, s[0], s[1]}); },
      [](const State<2>&, const State<2>&) { return true; });
  return traj;
}

PruferTrajectory prufer_from_solution(const SolutionTrajectory& traj, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("prufer_from_solution: eta > 0 required");
  if (std::fabs(traj.E - eta * eta / 4.0) > 1e-9 * std::max(1.0, std::fabs(traj.E)))
    throw std::invalid_argument("prufer_from_solution: E must equal eta^2/4");
  PruferTrajectory out;
  out.eta = eta;
  out.diag = traj.diag;
  out.samples.reserve(traj.samples.size());

  double logR0 = 0.0;
  double phase_prev = 0.0;
  bool first = true;
  for (const auto& s : traj.samples) {
    double cu = 2.0 * s.du / eta;
    double r2 = cu * cu + s.u * s.u;
    if (r2 == 0.0) throw DegenerateState(s.x);
    double logR = 0.5 * std::log(r2);
    double raw = std::atan2(s.u, cu);  // eta x/2 + theta, mod 2 pi
    double phase;
    if (first) {
      phase = raw;
      logR0 = logR;
      first = false;
    } else {
      double d = std::remainder(raw - phase_prev, 2.0 * M_PI);
      if (d <= -M_PI) d += 2.0 * M_PI;  // increments on (-pi, pi]
      phase = phase_prev + d;
    }
    phase_prev = phase;
    out.samples.push_back({s.x, logR - logR0, phase - eta * s.x / 2.0});
  }
  if (!out.samples.empty()) out.theta0 = out.samples.front().theta;
  return out;
}

OscBoundResult osc_integral_bound_check(const Potential& pot, std::span<const int> tuple, int K,
                                        double eta, double a, double b, double tol) {
  const int J = static_cast<int>(tuple.size());
  if (J < 1) throw std::invalid_argument("osc_integral_bound_check: nonempty tuple required");
  if (K < 0 || K > J) throw std::invalid_argument("osc_integral_bound_check: 0 <= K <= J");
  if (!(a >= 0.0) || !(a < b)) throw std::invalid_argument("osc_integral_bound_check: 0 <= a < b");
  for (int m : tuple)
    if (m < 0 || m >= static_cast<int>(pot.terms().size()))
      throw std::invalid_argument("osc_integral_bound_check: tuple index out of range");

  double phi = 0.0;
  for (int m : tuple) phi += pot.terms()[m].phi;

  // state: theta, logR, Re I, Im I with I' the oscillatory integrand
  auto rhs = [&](double x, const State<4>& y, State<4>& dy) {
    double V = pot.value(x);
    double xi = eta * x + 2.0 * y[0];
    double w = V / eta;
    double dtheta = w * (std::cos(xi) - 1.0);
    dy[0] = dtheta;
    dy[1] = w * std::sin(xi);
    double gamma = 1.0;
    for (int m : tuple) gamma *= pot.terms()[m].envelope(x);
    double ang = K * xi - phi * x;
    double amp = gamma * ((phi - K * eta) - 2.0 * K * dtheta);
    dy[2] = amp * std::cos(ang);
    dy[3] = amp * std::sin(ang);
  };
  auto veto = [](const State<4>& before, const State<4>& after) {
    return std::fabs(after[0] - before[0]) <= M_PI / 2.0;
  };

  std::array<double, 2> marks{a, b};
  std::vector<double> cps = merge_checkpoints(pot, b, marks);
  State<4> y{0.0, 0.0, 0.0, 0.0};
  std::complex<double> at_a{0.0, 0.0};
  bool have_a = (a == 0.0);
  integrate_dp5<4>(
      rhs, y, 0.0, b, tol, prufer_hmax(eta), cps,
      [&](double x, const State<4>& s) {
        if (!have_a && x >= a) {
          at_a = {s[2], s[3]};
          have_a = true;
        }
      },
      veto);

  OscBoundResult out;
  out.lhs = std::abs(std::complex<double>(y[2], y[3]) - at_a);
  out.rhs = 2.0;
  for (int m : tuple) out.rhs *= pot.terms()[m].envelope.variation_from(a);
  return out;
}

}  // namespace oscspec
