#include "oscspec/potential.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oscspec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_params(const std::vector<Term>& terms, int p, double alpha) {
  if (p < 2) throw std::invalid_argument("potential: p must be an integer >= 2");
  if (!(alpha > 0.0) || !(alpha < 1.0 / (p - 1)))
    throw std::invalid_argument("potential: alpha must lie in (0, 1/(p-1))");
  for (const auto& t : terms) {
    if (!std::isfinite(t.phi) || !std::isfinite(t.c.real()) || !std::isfinite(t.c.imag()))
      throw std::invalid_argument("potential: non-finite term");
    if (!std::isfinite(t.envelope.total_variation()))
      throw std::invalid_argument("potential: envelope with infinite variation");
  }
}

bool is_conjugate_pair(const Term& a, const Term& b) {
  return a.c == std::conj(b.c) && a.phi == -b.phi && a.envelope == b.envelope;
}

bool multiset_closed(const std::vector<Term>& terms) {
  std::vector<bool> matched(terms.size(), false);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (matched[i]) continue;
    if (is_conjugate_pair(terms[i], terms[i])) {  // self-conjugate: phi = 0, c real
      matched[i] = true;
      continue;
    }
    bool found = false;
    for (std::size_t j = i + 1; j < terms.size(); ++j) {
      if (matched[j]) continue;
      if (is_conjugate_pair(terms[i], terms[j])) {
        matched[i] = matched[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace

Potential build_potential(std::vector<Term> terms, int p, double alpha) {
  validate_params(terms, p, alpha);
  RealnessCertificate cert;
  if (multiset_closed(terms)) {
    cert = RealnessCertificate::ClosedAsGiven;
  } else {
    std::vector<Term> sym;
    sym.reserve(terms.size() * 2);
    for (auto& t : terms) sym.push_back({t.c * 0.5, t.phi, t.envelope});
    for (auto& t : terms) sym.push_back({std::conj(t.c) * 0.5, -t.phi, t.envelope});
    terms = std::move(sym);
    cert = RealnessCertificate::Symmetrized;
  }
  Potential pot;
  pot.terms_ = std::move(terms);
  pot.p_ = p;
  pot.alpha_ = alpha;
  pot.certificate_ = cert;
  for (const auto& t : pot.terms_) {
    double a = std::abs(t.c);
    pot.sum_abs_c_ += a;
    if (a > 0.0) pot.sum_abs_c_alpha_ += std::pow(a, alpha);
    pot.tau_ = std::max(pot.tau_, t.envelope.total_variation());
  }
  return pot;
}

Potential make_potential_unchecked(std::vector<Term> terms, int p, double alpha) {
  validate_params(terms, p, alpha);
  Potential pot;
  pot.terms_ = std::move(terms);
  pot.p_ = p;
  pot.alpha_ = alpha;
  pot.certificate_ = multiset_closed(pot.terms_) ? RealnessCertificate::ClosedAsGiven
                                                 : RealnessCertificate::Unchecked;
  for (const auto& t : pot.terms_) {
    double a = std::abs(t.c);
    pot.sum_abs_c_ += a;
    if (a > 0.0) pot.sum_abs_c_alpha_ += std::pow(a, alpha);
    pot.tau_ = std::max(pot.tau_, t.envelope.total_variation());
  }
  return pot;
}

double Potential::value(double x) const {
  double v = 0.0;
  for (const auto& t : terms_) {
    if (t.c.real() == 0.0 && t.c.imag() == 0.0) continue;
    double g = t.envelope(x);
    if (g == 0.0) continue;
    double ph = t.phi * x;
    // Re(c e^{-i phi x}) = Re(c) cos(phi x) + Im(c) sin(phi x)
    v += (t.c.real() * std::cos(ph) + t.c.imag() * std::sin(ph)) * g;
  }
  return v;
}

double Potential::sigma(double x) const {
  double s = 0.0;
  for (const auto& t : terms_) s = std::max(s, std::fabs(t.envelope(x)));
  return s;
}

PotentialEval eval_potential(const Potential& pot, double x) {
  if (x < 0.0) throw std::invalid_argument("eval_potential: x >= 0 required");
  PotentialEval out;
  out.term_values.reserve(pot.terms().size());
  std::complex<double> sum{0.0, 0.0};
  for (const auto& t : pot.terms()) {
    std::complex<double> beta =
        t.c * std::complex<double>(std::cos(t.phi * x), -std::sin(t.phi * x)) * t.envelope(x);
    out.term_values.push_back(beta);
    sum += beta;
  }
  out.V = sum.real();
  return out;
}

namespace {

// Ranks envelopes by asymptotic size: power-decay beats exponential, smaller
// power beats larger, smaller rate beats larger.
bool asymptotically_dominates(const Envelope& a, const Envelope& b) {
  auto cls = [](const Envelope& e) {
    switch (e.kind()) {
      case EnvelopeKind::PowerDecay: return 0;
      case EnvelopeKind::Exponential: return 1;
      default: return 2;  // compactly supported / zero
    }
  };
  return cls(a) < cls(b);
}

// integral_a^inf sigma(x)^p for mixed envelope families: adaptive quadrature
// on [a, X*] plus the closed-form tail of the envelope that dominates sigma
// beyond X*.
double sigma_lp_quadrature(const Potential& pot, double a, int p) {
  std::vector<const Envelope*> envs;
  for (const auto& t : pot.terms()) envs.push_back(&t.envelope);

  // asymptotically dominant envelope (largest gamma for large x)
  const Envelope* dom = envs.front();
  for (const auto* e : envs) {
    if (asymptotically_dominates(*e, *dom)) {
      dom = e;
    } else if (!asymptotically_dominates(*dom, *e)) {
      // same class: keep whichever is eventually larger
      double probe = 1.0;
      while ((*e)(probe) != (*dom)(probe) && probe < 1e12) probe *= 4.0;
      double x = std::min(probe, 1e12);
      if ((*e)(x) > (*dom)(x)) dom = e;
    }
  }
  if (std::isinf(dom->lp_tail(a, p))) return kInf;

  // Beyond X* every ratio gamma_other / gamma_dom is non-increasing, so one
  // pointwise majorization check certifies sigma = gamma_dom on [X*, inf).
  double X = std::max(a, 1.0);
  for (const auto* e : envs) {
    if (!e->breakpoints().empty()) X = std::max(X, e->breakpoints().back());
    if (e == dom) continue;
    if (dom->kind() == EnvelopeKind::PowerDecay) {
      if (e->kind() == EnvelopeKind::PowerDecay && e->beta() > dom->beta()) {
        // ratio hump of two powers
        X = std::max(X, (dom->beta() * e->x0() - e->beta() * dom->x0()) /
                            (e->beta() - dom->beta()));
      } else if (e->kind() == EnvelopeKind::Exponential) {
        // ratio hump of exp(-rx) against the power
        X = std::max(X, dom->beta() / e->beta());
      }
    }
  }
  auto majorizes = [&](double x) {
    double dv = (*dom)(x);
    for (const auto* e : envs)
      if ((*e)(x) > dv) return false;
    return true;
  };
  for (int iter = 0; iter < 200 && !majorizes(X); ++iter) X *= 2.0;

  auto integrand = [&](double x) { return std::pow(pot.sigma(x), p); };
  boost::math::quadrature::gauss_kronrod<double, 15> quad;
  double head = 0.0;
  if (X > a) {
    std::vector<double> cuts{a, X};
    for (const auto* e : envs)
      for (double b : e->breakpoints())
        if (b > a && b < X) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      head += quad.integrate(integrand, cuts[i], cuts[i + 1], 15, 1e-10);
  }
  return head + dom->lp_tail(std::max(X, a), p);
}

}  // namespace

EnvelopeStats envelope_stats(const Potential& pot, double x, double a) {
  if (x < 0.0 || a < 0.0) throw std::invalid_argument("envelope_stats: x, a >= 0 required");
  EnvelopeStats st;
  st.sigma_at_x = pot.sigma(x);
  st.tau = pot.tau();
  if (pot.terms().empty()) {
    st.lp_tail = 0.0;
    return st;
  }
  bool all_same = true;
  for (const auto& t : pot.terms())
    if (!(t.envelope == pot.terms().front().envelope)) {
      all_same = false;
      break;
    }
  st.lp_tail = all_same ? pot.terms().front().envelope.lp_tail(a, pot.p())
                        : sigma_lp_quadrature(pot, a, pot.p());
  return st;
}

WindowBounds ap_window_bounds(const Potential& pot, double T, double a_max, double grid_step) {
  if (!(T > 0.0)) throw std::invalid_argument("ap_window_bounds: T > 0 required");
  if (a_max < 0.0 || !(grid_step > 0.0))
    throw std::invalid_argument("ap_window_bounds: a_max >= 0 and grid_step > 0 required");
  if (pot.sum_abs_c() == 0.0) return {0.0, 0.0};

  auto w_of = [&](double x) {
    std::complex<double> w{0.0, 0.0};
    for (const auto& t : pot.terms())
      w += t.c * std::complex<double>(std::cos(t.phi * x), -std::sin(t.phi * x));
    return w;
  };
  auto abs_w = [&](double x) { return std::abs(w_of(x)); };

  double omega_max = 0.0;
  for (const auto& t : pot.terms()) omega_max = std::max(omega_max, std::fabs(t.phi));
  const double scan_step = std::min(T / 64.0, M_PI / (8.0 * std::max(omega_max, 1e-6)));

  // |W| has kinks at simple zeros of a real W; splitting there keeps the
  // panel integrands analytic
  bool treat_real = true;
  for (double x = 0.0; x <= a_max + T; x += 16.0 * scan_step)
    if (std::fabs(w_of(x).imag()) > 1e-12 * pot.sum_abs_c()) {
      treat_real = false;
      break;
    }

  boost::math::quadrature::gauss_kronrod<double, 15> quad;
  auto integrate_window = [&](double a) {
    std::vector<double> cuts{a, a + T};
    if (treat_real) {
      double prev_x = a;
      double prev_v = w_of(a).real();
      for (double x = a + scan_step; x <= a + T + 0.5 * scan_step; x += scan_step) {
        double v = w_of(std::min(x, a + T)).real();
        if ((prev_v < 0.0 && v > 0.0) || (prev_v > 0.0 && v < 0.0)) {
          double lo = prev_x, hi = std::min(x, a + T), flo = prev_v;
          for (int it = 0; it < 80 && hi - lo > 1e-15 * (1.0 + std::fabs(lo)); ++it) {
            double mid = 0.5 * (lo + hi);
            double fm = w_of(mid).real();
            if ((flo < 0.0) == (fm < 0.0)) {
              lo = mid;
              flo = fm;
            } else {
              hi = mid;
            }
          }
          cuts.push_back(0.5 * (lo + hi));
        }
        prev_x = std::min(x, a + T);
        prev_v = v;
      }
      std::sort(cuts.begin(), cuts.end());
    }
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      if (cuts[i + 1] > cuts[i]) total += quad.integrate(abs_w, cuts[i], cuts[i + 1], 15, 1e-9);
    return total;
  };

  WindowBounds wb;
  wb.delta = kInf;
  wb.Delta = -kInf;
  for (double a = 0.0; a <= a_max + 0.5 * grid_step; a += grid_step) {
    double v = integrate_window(a);
    wb.delta = std::min(wb.delta, v);
    wb.Delta = std::max(wb.Delta, v);
  }
  return wb;
}

}  // namespace oscspec
