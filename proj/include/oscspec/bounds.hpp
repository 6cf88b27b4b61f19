#pragma once

// Truncated small-divisor sums over the finite term list of a potential:
//
//   small_divisor_sum  sum over j-tuples of |c_{k1}..c_{kj} h_j(eta; phi...)|
//   E_{J,K}            sum over J-tuples of |c... g_{J,K}(eta; phi...)|
//   script E_{J,0}     sum over J-tuples of |c... G_{J,0}(eta; phi...)|
//   script_S_envelope  the absolute sum of f_{J,K} beta...beta at a point x,
//                      against its envelope bound
//                      (1/eta) sum_a |omega_a| E_{J-1,K+a} (sum|c|) sigma(x)^J
//   total_bound        sum_{j<p} sum_k E_{j,k} tau^j / k
//                      + sum_{J=2}^p scriptE_{J,0} tau^J
//                      + (2/eta) sum_{k=0}^{p-1} E_{p-1,k} (sum|c|) int_a^inf sigma^p
//
// Sums are exact over all tuples of the finite list. Tuples whose divisor
// nearly vanishes (|d| < 1e-12) are recorded in pole_hits and make the sum
// infinite (flagged, not fatal). Exact-rational recomputation entry points
// back the floating path in tests.

#include "oscspec/potential.hpp"
#include "oscspec/rational.hpp"

#include <span>
#include <vector>

namespace oscspec {

struct SumValue {
  double value = 0.0;
  bool finite = true;
  long terms_used = 0;
  double last_term_magnitude = 0.0;
  std::vector<std::vector<int>> pole_hits;  // 0-based term-index tuples
};

SumValue small_divisor_sum(const Potential& pot, int j, double eta);

SumValue sum_E(const Potential& pot, int J, int K, double eta);

SumValue sum_scriptE(const Potential& pot, int J, double eta);

struct EnvelopeBoundPair {
  double lhs = 0.0;
  double rhs = 0.0;
  bool finite = true;
};

EnvelopeBoundPair script_S_envelope(const Potential& pot, int J, int K, double eta, double x);

struct BoundBreakdown {
  double term1 = 0.0;
  double term2 = 0.0;
  double term3 = 0.0;
  double total = 0.0;
  bool finite = true;
};

BoundBreakdown total_bound(const Potential& pot, double eta, double a);

// Exact-rational recomputation for terms with rational |c| and phi.
struct ExactTerm {
  Rational abs_c;
  Rational phi;
};

Rational small_divisor_sum_exact(std::span<const ExactTerm> terms, int j, const Rational& eta);
Rational sum_E_exact(std::span<const ExactTerm> terms, int J, int K, const Rational& eta);
Rational sum_scriptE_exact(std::span<const ExactTerm> terms, int J, const Rational& eta);

}  // namespace oscspec
