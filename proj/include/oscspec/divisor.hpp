#pragma once

// Recursive small-divisor function algebra.
//
//   h_J(eta; phi_1..phi_J)   h_0 = 1,
//       h_J = [ sum_{j=0}^{J-1} h_j(phi_1..phi_j) h_{J-j-1}(phi_{j+1}..phi_{J-1}) ]
//             / (eta - phi_1 - ... - phi_J)
//   f_{J,K}, g_{J,K}         f_{1,0} = -1/eta, f_{1,1} = 1/eta,
//       g_{J,K} = -2K f_{J,K} / (K eta - sum phi),
//       f_{J,K} = (1/eta) sum_{a=-1..1} omega_a (.) g_{J-1,K+a}   for J >= 2,
//       zero outside J >= 1, 0 <= K <= J (g also vanishes at K = 0)
//   script G_{J,0}           the arity-J symmetric function with
//       f_{J,0} - breve f_{J,0} = (phi_1 + ... + phi_J) G_{J,0},
//       where breve flips the sign of every phi argument.
//
// Everything here evaluates pointwise; there is no symbolic normalization.
// The Rational instantiation is exact and is the reference path; the double
// instantiation is used by the summation machinery and flags near-vanishing
// divisors (|d| < 1e-12) instead of throwing.

#include "oscspec/rational.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace oscspec {

template <class S>
struct DivisorScalar;

template <>
struct DivisorScalar<Rational> {
  static bool is_pole(const Rational& d) { return d == 0; }
};

template <>
struct DivisorScalar<double> {
  static constexpr double pole_eps = 1e-12;
  static bool is_pole(double d) { return std::fabs(d) < pole_eps; }
};

namespace detail {

inline int popcount32(std::uint32_t m) {
#if defined(__GNUC__)
  return __builtin_popcount(m);
#else
  int c = 0;
  while (m) { c += m & 1u; m >>= 1; }
  return c;
#endif
}

// omega_0 = -1, omega_{+-1} = 1/2, zero otherwise.
template <class S>
S omega(int a) {
  if (a == 0) return S(-1);
  if (a == 1 || a == -1) return S(1) / S(2);
  return S(0);
}

// Per-(eta, phis) evaluation context. f and g are memoized over index
// subsets (they are symmetric), h over contiguous slices (it is not).
// nullopt marks a pole; the offending divisor is kept for diagnostics.
template <class S>
class DivisorContext {
 public:
  DivisorContext(S eta, std::vector<S> phis)
      : eta_(std::move(eta)), phis_(std::move(phis)) {
    if (phis_.size() > 24) throw std::invalid_argument("divisor: too many variables");
  }

  int size() const { return static_cast<int>(phis_.size()); }
  std::uint32_t full_mask() const { return (1u << phis_.size()) - 1u; }
  const S& eta() const { return eta_; }
  const std::vector<S>& phis() const { return phis_; }
  bool pole_seen() const { return pole_seen_; }
  const S& pole_denominator() const { return pole_den_; }

  // h over the slice phis[start .. start+len).
  std::optional<S> h(int start, int len) {
    if (len == 0) return S(1);
    int key = start * (size() + 1) + len;
    auto it = h_memo_.find(key);
    if (it != h_memo_.end()) return it->second;
    S den = eta_;
    for (int i = start; i < start + len; ++i) den -= phis_[i];
    std::optional<S> out;
    if (DivisorScalar<S>::is_pole(den)) {
      note_pole(den);
    } else {
      S acc(0);
      bool ok = true;
      for (int j = 0; j < len && ok; ++j) {
        auto left = h(start, j);
        auto right = h(start + j, len - 1 - j);
        if (!left || !right) { ok = false; break; }
        acc += *left * *right;
      }
      if (ok) out = acc / den;
    }
    h_memo_.emplace(key, out);
    return out;
  }

  std::optional<S> h_full() { return h(0, size()); }

  std::optional<S> f(int K, std::uint32_t mask) {
    int J = popcount32(mask);
    if (J <= 0 || K < 0 || K > J) return S(0);
    std::uint64_t key = make_key(0, K, mask);
    auto it = fg_memo_.find(key);
    if (it != fg_memo_.end()) return it->second;
    std::optional<S> out;
    if (J == 1) {
      if (DivisorScalar<S>::is_pole(eta_)) {
        note_pole(eta_);
      } else {
        out = (K == 1 ? S(1) : S(-1)) / eta_;
      }
    } else {
      S acc(0);
      bool ok = true;
      for (int a = -1; a <= 1 && ok; ++a) {
        S sub(0);
        for (std::uint32_t rest = mask; rest; rest &= rest - 1) {
          std::uint32_t bit = rest & (0u - rest);
          auto gv = g(K + a, mask & ~bit);
          if (!gv) { ok = false; break; }
          sub += *gv;
        }
        if (ok) acc += omega<S>(a) * sub / S(J);
      }
      if (ok) {
        if (DivisorScalar<S>::is_pole(eta_)) {
          note_pole(eta_);
        } else {
          out = acc / eta_;
        }
      }
    }
    fg_memo_.emplace(key, out);
    return out;
  }

  std::optional<S> g(int K, std::uint32_t mask) {
    int J = popcount32(mask);
    if (J <= 0 || K < 1 || K > J) return S(0);
    std::uint64_t key = make_key(1, K, mask);
    auto it = fg_memo_.find(key);
    if (it != fg_memo_.end()) return it->second;
    std::optional<S> out;
    S den = S(K) * eta_;
    for (std::uint32_t rest = mask; rest; rest &= rest - 1) {
      std::uint32_t bit = rest & (0u - rest);
      den -= phis_[bit_index(bit)];
    }
    if (DivisorScalar<S>::is_pole(den)) {
      note_pole(den);
    } else {
      auto fv = f(K, mask);
      if (fv) out = S(-2) * S(K) / den * *fv;
    }
    fg_memo_.emplace(key, out);
    return out;
  }

 private:
  static std::uint64_t make_key(int tag, int K, std::uint32_t mask) {
    return (std::uint64_t(tag) << 40) | (std::uint64_t(K + 2) << 32) | mask;
  }

  static int bit_index(std::uint32_t bit) {
#if defined(__GNUC__)
    return __builtin_ctz(bit);
#else
    int i = 0;
    while (!(bit & 1u)) { bit >>= 1; ++i; }
    return i;
#endif
  }

  void note_pole(const S& den) {
    if (!pole_seen_) {
      pole_seen_ = true;
      pole_den_ = den;
    }
  }

  S eta_;
  std::vector<S> phis_;
  std::unordered_map<int, std::optional<S>> h_memo_;
  std::unordered_map<std::uint64_t, std::optional<S>> fg_memo_;
  bool pole_seen_ = false;
  S pole_den_{0};
};

// G_{J,0}(eta; phis) = - sum_{j=1}^{J-1} sum_{k=1}^{min(j,J-j)} (1/4k) g_{j,k} (.) breve g_{J-j,k}.
// The overall sign makes f_{J,0} - breve f_{J,0} = (sum phi) G_{J,0} an exact
// identity; it is the defining property used by the verification suite.
// `neg` must be a context over the negated phi vector.
template <class S>
std::optional<S> script_g(DivisorContext<S>& pos, DivisorContext<S>& neg, int J) {
  if (J < 2 || J != pos.size()) throw std::invalid_argument("script_g: need J >= 2 matching arity");
  const std::uint32_t full = pos.full_mask();
  S total(0);
  for (int j = 1; j <= J - 1; ++j) {
    int kmax = std::min(j, J - j);
    for (int k = 1; k <= kmax; ++k) {
      S acc(0);
      long count = 0;
      for (std::uint32_t mask = 0; mask <= full; ++mask) {
        if (popcount32(mask) != j) continue;
        auto a = pos.g(k, mask);
        auto b = neg.g(k, full & ~mask);
        if (!a || !b) return std::nullopt;
        acc += *a * *b;
        ++count;
      }
      total += acc / (S(4) * S(k) * S(count));
    }
  }
  return -total;
}

}  // namespace detail

// --- Exact public entry points (throw PoleError on vanishing divisors) ---

Rational eval_h(int J, const Rational& eta, std::span<const Rational> phis);

struct FgValue {
  Rational f;
  Rational g;
};

// Zero convention: (0, 0) whenever J <= 0 or K outside [0, J].
FgValue eval_fg(int J, int K, const Rational& eta, std::span<const Rational> phis);

Rational eval_script_g(int J, const Rational& eta, std::span<const Rational> phis);

// --- Symmetric product ---

struct SymFunction {
  int arity = 0;
  // Marked by constructors/tests when the evaluator is known symmetric in its
  // phi arguments; sym_product then averages over subset splits only.
  bool symmetric = false;
  std::string label;
  std::function<Rational(const Rational&, std::span<const Rational>)> eval;
};

// (p (.) q)(eta; phi_1..phi_{I+J}): the permutation average of
// p(eta; first I args) q(eta; last J args). Computed over index splits,
// with factors symmetrized internally when not already symmetric.
SymFunction sym_product(const SymFunction& p, const SymFunction& q);

// --- Identity verification ---

struct IdentityReport {
  std::string identity;   // "2.21" | "2.22" | "2.23" | "catalan"
  int J = 0;
  int K = -1;             // -1 when not applicable
  int k = -1;
  long trials = 0;
  Rational max_discrepancy;  // exact; must be 0
  std::vector<std::string> witnesses;

  bool passed() const { return max_discrepancy == 0; }
};

// Evaluates both sides of each identity at `trials` random rational points
// (poles are resampled, never fatal):
//   2.21  f_{J,K} = 1/2 sum_j f_{j,k} (.) g_{J-j,K-k}  and the same with g,
//         for 2 <= K <= J <= J_max, 0 < k < K
//   2.22  f_{J,0} - breve f_{J,0} = (sum phi) G_{J,0}, for 2 <= J <= J_max
//   2.23  g_{J,1} = -(2/eta^J) (1/J!) sum_sigma h_J(phi_sigma), for J <= J_max
//   catalan  C_J = sum_j C_j C_{J-j-1} with C_J = binom(2J,J)/(J+1), J <= J_max
std::vector<IdentityReport> verify_identities(int J_max, int trials, std::uint64_t seed);

bool verify_catalan(int J_max);

void write_identity_report(std::span<const IdentityReport> reports, const std::string& path);

}  // namespace oscspec
