#include "oscspec/bounds.hpp"

#include "oscspec/divisor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oscspec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Ordered-tuple odometer over {0..n-1}^j. Returns false when exhausted.
bool next_tuple(std::vector<int>& idx, int n) {
  for (int pos = static_cast<int>(idx.size()) - 1; pos >= 0; --pos) {
    if (++idx[pos] < n) return true;
    idx[pos] = 0;
  }
  return false;
}

// Non-decreasing multi-index odometer (multisets via sorted tuples).
bool next_multiset(std::vector<int>& idx, int n) {
  for (int pos = static_cast<int>(idx.size()) - 1; pos >= 0; --pos) {
    if (idx[pos] + 1 < n) {
      int v = idx[pos] + 1;
      for (std::size_t q = pos; q < idx.size(); ++q) idx[q] = v;
      return true;
    }
  }
  return false;
}

// Number of distinct orderings of a sorted tuple.
double multiset_orderings(const std::vector<int>& sorted) {
  double count = 1.0;
  // J! / prod(mult!)
  for (std::size_t i = 1; i <= sorted.size(); ++i) count *= static_cast<double>(i);
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    double fact = 1.0;
    while (j < sorted.size() && sorted[j] == sorted[i]) {
      fact *= static_cast<double>(j - i + 1);
      ++j;
    }
    count /= fact;
    i = j;
  }
  return count;
}

template <class S>
S abs_c_product(const std::vector<S>& abs_c, const std::vector<int>& idx) {
  S p(1);
  for (int i : idx) p *= abs_c[i];
  return p;
}

}  // namespace

SumValue small_divisor_sum(const Potential& pot, int j, double eta) {
  if (j < 1 || j > pot.p() - 1)
    throw std::invalid_argument("small_divisor_sum: need 1 <= j <= p-1");
  SumValue out;
  const auto& terms = pot.terms();
  const int n = static_cast<int>(terms.size());
  if (n == 0) return out;

  std::vector<int> idx(j, 0);
  std::vector<double> phis(j);
  do {
    ++out.terms_used;
    double cprod = 1.0;
    for (int q = 0; q < j; ++q) {
      cprod *= std::abs(terms[idx[q]].c);
      phis[q] = terms[idx[q]].phi;
    }
    detail::DivisorContext<double> ctx(eta, phis);
    auto hv = ctx.h_full();
    if (!hv) {
      out.finite = false;
      out.value = kInf;
      out.pole_hits.push_back(idx);
      continue;
    }
    double term = cprod * std::fabs(*hv);
    out.last_term_magnitude = term;
    if (out.finite) out.value += term;
  } while (next_tuple(idx, n));
  return out;
}

SumValue sum_E(const Potential& pot, int J, int K, double eta) {
  if (J < 1) throw std::invalid_argument("sum_E: J >= 1 required");
  SumValue out;
  if (K < 1 || K > J) return out;  // g_{J,K} vanishes there
  const auto& terms = pot.terms();
  const int n = static_cast<int>(terms.size());
  if (n == 0) return out;

  std::vector<int> idx(J, 0);
  std::vector<double> phis(J);
  do {
    double orderings = multiset_orderings(idx);
    out.terms_used += static_cast<long>(orderings);
    double cprod = 1.0;
    for (int q = 0; q < J; ++q) {
      cprod *= std::abs(terms[idx[q]].c);
      phis[q] = terms[idx[q]].phi;
    }
    detail::DivisorContext<double> ctx(eta, phis);
    auto gv = ctx.g(K, ctx.full_mask());
    if (!gv) {
      out.finite = false;
      out.value = kInf;
      out.pole_hits.push_back(idx);
      continue;
    }
    double term = cprod * std::fabs(*gv);
    out.last_term_magnitude = term;
    if (out.finite) out.value += term * orderings;
  } while (next_multiset(idx, n));
  return out;
}

SumValue sum_scriptE(const Potential& pot, int J, double eta) {
  if (J < 2 || J > pot.p())
    throw std::invalid_argument("sum_scriptE: need 2 <= J <= p");
  SumValue out;
  const auto& terms = pot.terms();
  const int n = static_cast<int>(terms.size());
  if (n == 0) return out;

  std::vector<int> idx(J, 0);
  std::vector<double> phis(J), nphis(J);
  do {
    double orderings = multiset_orderings(idx);
    out.terms_used += static_cast<long>(orderings);
    double cprod = 1.0;
    for (int q = 0; q < J; ++q) {
      cprod *= std::abs(terms[idx[q]].c);
      phis[q] = terms[idx[q]].phi;
      nphis[q] = -phis[q];
    }
    detail::DivisorContext<double> cpos(eta, phis);
    detail::DivisorContext<double> cneg(eta, nphis);
    auto Gv = detail::script_g(cpos, cneg, J);
    if (!Gv) {
      out.finite = false;
      out.value = kInf;
      out.pole_hits.push_back(idx);
      continue;
    }
    double term = cprod * std::fabs(*Gv);
    out.last_term_magnitude = term;
    if (out.finite) out.value += term * orderings;
  } while (next_multiset(idx, n));
  return out;
}

EnvelopeBoundPair script_S_envelope(const Potential& pot, int J, int K, double eta, double x) {
  if (J < 2 || J > pot.p())
    throw std::invalid_argument("script_S_envelope: need 2 <= J <= p");
  if (K < 0 || K > J) throw std::invalid_argument("script_S_envelope: need 0 <= K <= J");
  EnvelopeBoundPair out;
  const auto& terms = pot.terms();
  const int n = static_cast<int>(terms.size());

  if (n > 0) {
    std::vector<int> idx(J, 0);
    std::vector<double> phis(J);
    do {
      double orderings = multiset_orderings(idx);
      double bprod = 1.0;
      for (int q = 0; q < J; ++q) {
        const Term& t = terms[idx[q]];
        bprod *= std::abs(t.c) * std::fabs(t.envelope(x));
        phis[q] = t.phi;
      }
      if (bprod == 0.0) continue;
      detail::DivisorContext<double> ctx(eta, phis);
      auto fv = ctx.f(K, ctx.full_mask());
      if (!fv) {
        out.finite = false;
        out.lhs = kInf;
        continue;
      }
      if (out.finite) out.lhs += std::fabs(*fv) * bprod * orderings;
    } while (next_multiset(idx, n));
  }

  // (1/eta) [ (1/2) E_{J-1,K-1} + E_{J-1,K} + (1/2) E_{J-1,K+1} ] (sum|c|) sigma(x)^J
  double e_lo = 0.0, e_mid = 0.0, e_hi = 0.0;
  bool fin = true;
  auto grab = [&](int KK) -> double {
    if (KK < 1 || KK > J - 1) return 0.0;
    SumValue s = sum_E(pot, J - 1, KK, eta);
    fin = fin && s.finite;
    return s.value;
  };
  e_lo = grab(K - 1);
  e_mid = grab(K);
  e_hi = grab(K + 1);
  double sig = pot.sigma(x);
  out.rhs = (0.5 * e_lo + e_mid + 0.5 * e_hi) / std::fabs(eta) * pot.sum_abs_c() *
            std::pow(sig, J);
  out.finite = out.finite && fin;
  if (!out.finite) out.rhs = kInf;
  return out;
}

BoundBreakdown total_bound(const Potential& pot, double eta, double a) {
  if (!(eta > 0.0)) throw std::invalid_argument("total_bound: eta > 0 required");
  if (a < 0.0) throw std::invalid_argument("total_bound: a >= 0 required");
  BoundBreakdown out;
  const int p = pot.p();
  const double tau = pot.tau();

  for (int j = 1; j <= p - 1; ++j) {
    SumValue h = small_divisor_sum(pot, j, eta);
    if (!h.finite) out.finite = false;
  }

  double tau_pow = tau;
  for (int j = 1; j <= p - 1; ++j, tau_pow *= tau) {
    for (int k = 1; k <= j; ++k) {
      SumValue e = sum_E(pot, j, k, eta);
      if (!e.finite) out.finite = false;
      out.term1 += e.value * tau_pow / k;
    }
  }

  tau_pow = tau * tau;
  for (int J = 2; J <= p; ++J, tau_pow *= tau) {
    SumValue se = sum_scriptE(pot, J, eta);
    if (!se.finite) out.finite = false;
    out.term2 += se.value * tau_pow;
  }

  double esum = 0.0;
  for (int k = 0; k <= p - 1; ++k) {
    SumValue e = sum_E(pot, p - 1, k, eta);
    if (!e.finite) out.finite = false;
    esum += e.value;
  }
  double tail = envelope_stats(pot, 0.0, a).lp_tail;
  if (std::isinf(tail)) out.finite = false;
  out.term3 = 2.0 / eta * esum * pot.sum_abs_c() * tail;

  out.total = out.term1 + out.term2 + out.term3;
  if (!out.finite) out.total = kInf;
  return out;
}

// --- exact recomputation ---

namespace {

template <class F>
Rational exact_multiset_sum(std::span<const ExactTerm> terms, int J, F&& eval) {
  const int n = static_cast<int>(terms.size());
  if (n == 0 || J == 0) return Rational(0);
  std::vector<int> idx(J, 0);
  Rational total(0);
  do {
    Rational cprod(1);
    std::vector<Rational> phis(J);
    for (int q = 0; q < J; ++q) {
      cprod *= terms[idx[q]].abs_c;
      phis[q] = terms[idx[q]].phi;
    }
    Rational v = eval(phis);
    total += cprod * abs(v) * Rational(static_cast<long>(multiset_orderings(idx)));
  } while (next_multiset(idx, n));
  return total;
}

}  // namespace

Rational small_divisor_sum_exact(std::span<const ExactTerm> terms, int j, const Rational& eta) {
  const int n = static_cast<int>(terms.size());
  if (n == 0) return Rational(0);
  std::vector<int> idx(j, 0);
  Rational total(0);
  do {
    Rational cprod(1);
    std::vector<Rational> phis(j);
    for (int q = 0; q < j; ++q) {
      cprod *= terms[idx[q]].abs_c;
      phis[q] = terms[idx[q]].phi;
    }
    total += cprod * abs(eval_h(j, eta, phis));
  } while (next_tuple(idx, n));
  return total;
}

Rational sum_E_exact(std::span<const ExactTerm> terms, int J, int K, const Rational& eta) {
  if (K < 1 || K > J) return Rational(0);
  return exact_multiset_sum(terms, J, [&](std::span<const Rational> phis) {
    return eval_fg(J, K, eta, phis).g;
  });
}

Rational sum_scriptE_exact(std::span<const ExactTerm> terms, int J, const Rational& eta) {
  return exact_multiset_sum(terms, J, [&](std::span<const Rational> phis) {
    return eval_script_g(J, eta, phis);
  });
}

}  // namespace oscspec
