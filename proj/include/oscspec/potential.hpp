#pragma once

// Oscillatory decaying potentials
//     V(x) = sum_k c_k exp(-i phi_k x) gamma_k(x)
// over finite term lists, with envelope statistics
//     sigma(x) = max_k |gamma_k(x)|,
//     tau      = max_k Var(gamma_k, (0, inf)),
//     L^p tail = integral_a^inf sigma(x)^p dx.
// Realness of V is enforced by closing the term multiset under
// (c, phi, gamma) -> (conj c, -phi, gamma).

#include "oscspec/envelope.hpp"

#include <complex>
#include <span>
#include <vector>

namespace oscspec {

struct Term {
  std::complex<double> c{0.0, 0.0};
  double phi = 0.0;
  Envelope envelope = Envelope::zero();
};

enum class RealnessCertificate {
  ClosedAsGiven,  // input multiset already closed under conjugation-negation
  Symmetrized,    // coefficients halved and conjugate terms appended
  Unchecked       // constructed without closure; V(x) is taken as Re of the sum
};

class Potential {
 public:
  const std::vector<Term>& terms() const { return terms_; }
  int p() const { return p_; }
  double alpha() const { return alpha_; }
  RealnessCertificate certificate() const { return certificate_; }

  double sum_abs_c() const { return sum_abs_c_; }
  double sum_abs_c_alpha() const { return sum_abs_c_alpha_; }
  double tau() const { return tau_; }
  bool empty() const { return terms_.empty(); }

  // Re sum_k beta_k(x); allocation-free (hot path for the integrators).
  double value(double x) const;

  // max_k |gamma_k(x)| over all terms (placeholders included).
  double sigma(double x) const;

 private:
  friend Potential build_potential(std::vector<Term>, int, double);
  friend Potential make_potential_unchecked(std::vector<Term>, int, double);
  Potential() = default;

  std::vector<Term> terms_;
  int p_ = 2;
  double alpha_ = 0.5;
  RealnessCertificate certificate_ = RealnessCertificate::ClosedAsGiven;
  double sum_abs_c_ = 0.0;
  double sum_abs_c_alpha_ = 0.0;
  double tau_ = 0.0;
};

// Validates (p >= 2 integer, 0 < alpha < 1/(p-1), envelopes finite-variation)
// and enforces conjugate closure: a list that is not already closed is
// averaged with its complex conjugate (all coefficients halved, conjugate
// terms appended), which forces V real.
Potential build_potential(std::vector<Term> terms, int p, double alpha);

// Same validation but no closure enforcement; for the summation machinery,
// which is well-defined for arbitrary term lists.
Potential make_potential_unchecked(std::vector<Term> terms, int p, double alpha);

struct PotentialEval {
  double V = 0.0;
  std::vector<std::complex<double>> term_values;  // beta_k(x) per term
};

PotentialEval eval_potential(const Potential& pot, double x);

struct EnvelopeStats {
  double sigma_at_x = 0.0;
  double tau = 0.0;
  double lp_tail = 0.0;  // integral_a^inf sigma^p; closed form when the terms
                         // share one envelope, adaptive quadrature otherwise
};

EnvelopeStats envelope_stats(const Potential& pot, double x, double a);

struct WindowBounds {
  double delta = 0.0;
  double Delta = 0.0;
};

// min/max over window starts a in {0, grid_step, ..., <= a_max} of
// integral_a^{a+T} |W(x)| dx for the almost-periodic factor
// W(x) = sum_k c_k exp(-i phi_k x) (envelopes ignored).
WindowBounds ap_window_bounds(const Potential& pot, double T, double a_max, double grid_step);

}  // namespace oscspec
