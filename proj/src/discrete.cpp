#include "oscspec/discrete.hpp"

#include "oscspec/rational.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace oscspec {

namespace {

std::string radicand_msg(int index, double value) {
  std::ostringstream os;
  os << "nonpositive radicand " << value << " at n=" << index;
  return os.str();
}

}  // namespace

RadicandError::RadicandError(int index, double value)
    : std::runtime_error(radicand_msg(index, value)), n(index), radicand(value) {}

CoeffSequence CoeffSequence::opuc(std::vector<std::complex<double>> alphas) {
  for (const auto& a : alphas)
    if (!(std::abs(a) < 1.0))
      throw std::invalid_argument("opuc: |alpha_n| < 1 required");
  CoeffSequence s;
  s.origin_ = Origin::OpucDirect;
  s.n_ = alphas.size();
  s.alphas_ = std::move(alphas);
  return s;
}

CoeffSequence CoeffSequence::opuc_structured(std::vector<DiscreteTerm> terms, int n_values) {
  if (n_values < 1) throw std::invalid_argument("opuc_structured: n_values >= 1 required");
  std::vector<std::complex<double>> alphas(n_values);
  for (int n = 0; n < n_values; ++n) {
    std::complex<double> a{0.0, 0.0};
    for (const auto& t : terms) {
      double ph = t.phi * n;
      a += t.c * std::complex<double>(std::cos(ph), -std::sin(ph)) * t.envelope(n);
    }
    alphas[n] = a;
  }
  CoeffSequence s = opuc(std::move(alphas));
  s.terms_ = std::move(terms);
  return s;
}

CoeffSequence CoeffSequence::oprl(std::vector<double> a, std::vector<double> b) {
  if (b.size() != a.size() + 1)
    throw std::invalid_argument("oprl: need b_0..b_N alongside a_0..a_{N-1}");
  for (double an : a)
    if (!(an > 0.0)) throw std::invalid_argument("oprl: a_n > 0 required");
  CoeffSequence s;
  s.origin_ = Origin::OprlDerived;
  s.n_ = a.size();
  s.a_ = std::move(a);
  s.b_ = std::move(b);
  return s;
}

std::complex<double> CoeffSequence::alpha(int n, double eta) const {
  if (n < 0 || static_cast<std::size_t>(n) >= n_)
    throw std::out_of_range("CoeffSequence::alpha: index out of range");
  if (origin_ == Origin::OpucDirect) return alphas_[n];
  return oprl_alpha(a_[n], b_[n + 1], eta);
}

std::complex<double> oprl_alpha(double a_n, double b_next, double eta) {
  if (!(a_n > 0.0)) throw std::invalid_argument("oprl_alpha: a_n > 0 required");
  std::complex<double> den = std::polar(1.0, eta) - 1.0;
  if (std::abs(den) < 1e-14)
    throw PoleError("oprl_alpha: eta in 2 pi Z", Rational(0));
  return (a_n * a_n - 1.0 + std::polar(1.0, eta / 2.0) * b_next) / den;
}

StepResult prufer_step(std::complex<double> alpha, double eta, int n, double theta, int c) {
  if (c != 0 && c != 1) throw std::invalid_argument("prufer_step: c must be 0 or 1");
  const double cd = static_cast<double>(c);
  const std::complex<double> ac = std::conj(alpha);
  double radicand = ((1.0 - cd * alpha) * (1.0 - cd * ac)).real() - (alpha * ac).real();
  if (!(radicand > 0.0)) throw RadicandError(n, radicand);

  const double psi = (n + 1) * eta + 2.0 * theta;
  const std::complex<double> w = std::polar(1.0, psi);
  const std::complex<double> den = 1.0 - alpha * w - cd * ac;
  const std::complex<double> num = 1.0 - ac * std::conj(w) - cd * alpha;  // = conj(den)

  StepResult out;
  out.log_ratio = std::log(std::abs(den) / std::sqrt(radicand));
  out.theta_next = theta + 0.5 * std::arg(num / den);
  return out;
}

DiscreteTrajectory run_discrete(const CoeffSequence& seq, double eta, double theta0) {
  DiscreteTrajectory tr;
  tr.eta = eta;
  tr.c = seq.origin() == CoeffSequence::Origin::OprlDerived ? 1 : 0;
  const std::size_t N = seq.size();
  tr.log_r.reserve(N + 1);
  tr.theta.reserve(N + 1);
  tr.log_r.push_back(0.0);
  tr.theta.push_back(theta0);
  for (std::size_t n = 0; n < N; ++n) {
    StepResult s = prufer_step(seq.alpha(static_cast<int>(n), eta), eta, static_cast<int>(n),
                               tr.theta.back(), tr.c);
    tr.log_r.push_back(tr.log_r.back() + s.log_ratio);
    tr.theta.push_back(s.theta_next);
  }
  return tr;
}

double szego_compare(const CoeffSequence& seq, double eta, int N) {
  if (seq.origin() != CoeffSequence::Origin::OpucDirect)
    throw std::invalid_argument("szego_compare: opuc-direct sequence required");
  if (N < 0 || static_cast<std::size_t>(N) > seq.size())
    throw std::invalid_argument("szego_compare: N out of range");

  DiscreteTrajectory tr = run_discrete(seq, eta, 0.0);

  const std::complex<double> z = std::polar(1.0, eta);
  std::complex<double> phi{1.0, 0.0}, phistar{1.0, 0.0};
  double log_abs_phi = 0.0;
  double sum_log = 0.0;
  double worst = 0.0;
  for (int n = 0; n <= N; ++n) {
    double dev = std::fabs(tr.log_r[n] + 0.5 * sum_log - log_abs_phi);
    worst = std::max(worst, dev);
    if (n == N) break;
    std::complex<double> a = seq.alpha(n, eta);
    if (a == std::complex<double>{0.0, 0.0}) {
      // |z Phi| = |Phi| exactly: the log increment is 0
      phi *= z;
      continue;
    }
    std::complex<double> nphi = z * phi - std::conj(a) * phistar;
    std::complex<double> nphistar = phistar - a * z * phi;
    double s = std::abs(nphi);
    log_abs_phi += std::log(s);
    phi = nphi / s;  // renormalize to avoid overflow; only log|Phi| matters
    phistar = nphistar / s;
    sum_log += std::log(1.0 - std::norm(a));
  }
  return worst;
}

SumBoundResult discrete_sum_bound_check(const CoeffSequence& seq, std::span<const int> plus_terms,
                                        std::span<const int> minus_terms, int k, double eta,
                                        int M, int N) {
  if (!seq.structured())
    throw std::invalid_argument("discrete_sum_bound_check: structured sequence required");
  if (plus_terms.size() + minus_terms.size() < 1)
    throw std::invalid_argument("discrete_sum_bound_check: s + t >= 1 required");
  if (M < 0 || N < M || static_cast<std::size_t>(N + 1) >= seq.size() + 1)
    throw std::invalid_argument("discrete_sum_bound_check: need 0 <= M <= N < size");
  const auto& terms = seq.structured_terms();
  auto check_idx = [&](int i) {
    if (i < 0 || static_cast<std::size_t>(i) >= terms.size())
      throw std::invalid_argument("discrete_sum_bound_check: term index out of range");
  };
  for (int i : plus_terms) check_idx(i);
  for (int i : minus_terms) check_idx(i);

  DiscreteTrajectory tr = run_discrete(seq, eta, 0.0);

  double phi = 0.0;
  for (int i : plus_terms) phi += terms[i].phi;
  for (int i : minus_terms) phi -= terms[i].phi;

  std::complex<double> total{0.0, 0.0};
  const std::complex<double> rot = std::polar(1.0, -(k * eta - phi)) - 1.0;
  for (int n = M; n <= N; ++n) {
    double gamma = 1.0;
    for (int i : plus_terms) gamma *= terms[i].envelope(n);
    for (int i : minus_terms) gamma *= terms[i].envelope(n);  // real envelopes
    std::complex<double> base =
        std::polar(1.0, -n * phi) * std::polar(1.0, k * ((n + 1) * eta + 2.0 * tr.theta[n]));
    std::complex<double> dstep = std::polar(1.0, 2.0 * k * (tr.theta[n + 1] - tr.theta[n])) - 1.0;
    total += rot * gamma * base - gamma * base * dstep;
  }

  SumBoundResult out;
  out.lhs = std::abs(total);
  double tau = 0.0;
  for (int i : plus_terms) tau = std::max(tau, terms[i].envelope.discrete_variation_from(M));
  for (int i : minus_terms) tau = std::max(tau, terms[i].envelope.discrete_variation_from(M));
  out.rhs = 2.0 * std::pow(tau, static_cast<double>(plus_terms.size() + minus_terms.size()));
  return out;
}

}  // namespace oscspec
