#include "oscspec/divisor.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

namespace oscspec {

namespace {

std::vector<Rational> to_vec(std::span<const Rational> phis) {
  return std::vector<Rational>(phis.begin(), phis.end());
}

std::string point_string(const Rational& eta, std::span<const Rational> phis) {
  std::ostringstream os;
  os << "eta=" << eta.str() << " phi=(";
  for (std::size_t i = 0; i < phis.size(); ++i) {
    if (i) os << ",";
    os << phis[i].str();
  }
  os << ")";
  return os.str();
}

}  // namespace

Rational eval_h(int J, const Rational& eta, std::span<const Rational> phis) {
  if (J < 0 || static_cast<int>(phis.size()) != J)
    throw std::invalid_argument("eval_h: phi count must equal J");
  detail::DivisorContext<Rational> ctx(eta, to_vec(phis));
  auto v = ctx.h_full();
  if (!v) throw PoleError("eval_h: vanishing divisor", ctx.pole_denominator());
  return *v;
}

FgValue eval_fg(int J, int K, const Rational& eta, std::span<const Rational> phis) {
  if (J >= 1 && static_cast<int>(phis.size()) != J)
    throw std::invalid_argument("eval_fg: phi count must equal J");
  if (J <= 0 || K < 0 || K > J) return {Rational(0), Rational(0)};
  detail::DivisorContext<Rational> ctx(eta, to_vec(phis));
  auto fv = ctx.f(K, ctx.full_mask());
  auto gv = ctx.g(K, ctx.full_mask());
  if (!fv || !gv) throw PoleError("eval_fg: vanishing divisor", ctx.pole_denominator());
  return {*fv, *gv};
}

Rational eval_script_g(int J, const Rational& eta, std::span<const Rational> phis) {
  if (J < 2 || static_cast<int>(phis.size()) != J)
    throw std::invalid_argument("eval_script_g: need J >= 2 with matching phi count");
  std::vector<Rational> pos = to_vec(phis);
  std::vector<Rational> neg(pos.size());
  std::transform(pos.begin(), pos.end(), neg.begin(), [](const Rational& r) { return -r; });
  detail::DivisorContext<Rational> cpos(eta, std::move(pos));
  detail::DivisorContext<Rational> cneg(eta, std::move(neg));
  auto v = detail::script_g(cpos, cneg, J);
  if (!v) {
    const Rational& d = cpos.pole_seen() ? cpos.pole_denominator() : cneg.pole_denominator();
    throw PoleError("eval_script_g: vanishing divisor", d);
  }
  return *v;
}

namespace {

// Average of fn over all permutations of its argument list.
Rational permutation_average(
    const std::function<Rational(const Rational&, std::span<const Rational>)>& fn,
    const Rational& eta, std::vector<Rational> args) {
  std::sort(args.begin(), args.end());
  Rational acc(0);
  long count = 0;
  do {
    acc += fn(eta, args);
    ++count;
  } while (std::next_permutation(args.begin(), args.end()));
  return acc / count;
}

}  // namespace

SymFunction sym_product(const SymFunction& p, const SymFunction& q) {
  const int I = p.arity, J = q.arity;
  if (I < 0 || J < 0) throw std::invalid_argument("sym_product: negative arity");
  auto peval = p.eval;
  auto qeval = q.eval;
  const bool psym = p.symmetric || I <= 1;
  const bool qsym = q.symmetric || J <= 1;

  SymFunction out;
  out.arity = I + J;
  out.symmetric = true;
  out.label = "(" + p.label + " (.) " + q.label + ")";
  out.eval = [=](const Rational& eta, std::span<const Rational> phis) -> Rational {
    const int n = I + J;
    if (static_cast<int>(phis.size()) != n)
      throw std::invalid_argument("sym_product: arity mismatch");
    if (n == 0) return peval(eta, {}) * qeval(eta, {});
    const std::uint32_t full = (1u << n) - 1u;
    Rational acc(0);
    long splits = 0;
    std::vector<Rational> sel, rest;
    for (std::uint32_t mask = 0; mask <= full; ++mask) {
      if (detail::popcount32(mask) != I) continue;
      sel.clear();
      rest.clear();
      for (int i = 0; i < n; ++i)
        ((mask >> i) & 1u ? sel : rest).push_back(phis[i]);
      Rational pv = psym ? peval(eta, sel) : permutation_average(peval, eta, sel);
      Rational qv = qsym ? qeval(eta, rest) : permutation_average(qeval, eta, rest);
      acc += pv * qv;
      ++splits;
    }
    return acc / splits;
  };
  return out;
}

bool verify_catalan(int J_max) {
  std::vector<Rational> C(J_max + 1);
  for (int j = 0; j <= J_max; ++j)
    C[j] = Rational(binomial(2 * j, j), BigInt(j + 1));
  for (int J = 1; J <= J_max; ++J) {
    Rational s(0);
    for (int j = 0; j < J; ++j) s += C[j] * C[J - j - 1];
    if (s != C[J]) return false;
  }
  return true;
}

namespace {

struct SamplePoint {
  Rational eta;
  std::vector<Rational> phis;
};

SamplePoint sample_point(RationalSampler& sampler, int J) {
  SamplePoint p;
  p.eta = sampler.next_positive();
  p.phis.resize(J);
  for (auto& phi : p.phis) phi = sampler.next();
  return p;
}

// Runs `check` at `trials` pole-free random points; a nullopt result means
// the point hit a pole and is resampled.
IdentityReport run_identity(
    const std::string& id, int J, int K, int k, int trials, RationalSampler& sampler,
    const std::function<std::optional<Rational>(const Rational&, std::span<const Rational>)>&
        check) {
  IdentityReport rep;
  rep.identity = id;
  rep.J = J;
  rep.K = K;
  rep.k = k;
  rep.max_discrepancy = 0;
  int done = 0;
  int attempts = 0;
  const int max_attempts = trials * 50 + 1000;
  while (done < trials && attempts < max_attempts) {
    ++attempts;
    SamplePoint pt = sample_point(sampler, J);
    std::optional<Rational> d;
    try {
      d = check(pt.eta, pt.phis);
    } catch (const PoleError&) {
      d = std::nullopt;
    }
    if (!d) continue;  // pole: resample
    ++done;
    Rational a = abs(*d);
    if (a > rep.max_discrepancy) rep.max_discrepancy = a;
    if (*d != 0 && rep.witnesses.size() < 5)
      rep.witnesses.push_back(point_string(pt.eta, pt.phis) + " discrepancy=" + d->str());
  }
  rep.trials = done;
  return rep;
}

}  // namespace

std::vector<IdentityReport> verify_identities(int J_max, int trials, std::uint64_t seed) {
  if (J_max < 2) throw std::invalid_argument("verify_identities: J_max >= 2 required");
  if (trials < 1) throw std::invalid_argument("verify_identities: trials >= 1 required");
  RationalSampler sampler(seed);
  std::vector<IdentityReport> reports;

  // 2.21 (both product expansions), admissible 2 <= K <= J, 0 < k < K.
  for (int J = 2; J <= J_max; ++J) {
    for (int K = 2; K <= J; ++K) {
      for (int k = 1; k < K; ++k) {
        auto check = [J, K, k](const Rational& eta,
                               std::span<const Rational> phis) -> std::optional<Rational> {
          detail::DivisorContext<Rational> ctx(eta, {phis.begin(), phis.end()});
          const std::uint32_t full = ctx.full_mask();
          auto lf = ctx.f(K, full);
          auto lg = ctx.g(K, full);
          if (!lf || !lg) return std::nullopt;
          Rational rf(0), rg(0);
          for (int j = 0; j <= J; ++j) {
            Rational acc_f(0), acc_g(0);
            long count = 0;
            for (std::uint32_t mask = 0; mask <= full; ++mask) {
              if (detail::popcount32(mask) != j) continue;
              auto qg = ctx.g(K - k, full & ~mask);
              auto pf = ctx.f(k, mask);
              auto pg = ctx.g(k, mask);
              if (!qg || !pf || !pg) return std::nullopt;
              acc_f += *pf * *qg;
              acc_g += *pg * *qg;
              ++count;
            }
            rf += acc_f / count;
            rg += acc_g / count;
          }
          rf /= 2;
          rg /= 2;
          Rational df = abs(*lf - rf);
          Rational dg = abs(*lg - rg);
          return df > dg ? df : dg;
        };
        reports.push_back(run_identity("2.21", J, K, k, trials, sampler, check));
      }
    }
  }

  // 2.22: f_{J,0} - breve f_{J,0} = (sum phi) G_{J,0}.
  for (int J = 2; J <= J_max; ++J) {
    auto check = [J](const Rational& eta,
                     std::span<const Rational> phis) -> std::optional<Rational> {
      std::vector<Rational> pos(phis.begin(), phis.end());
      std::vector<Rational> neg(pos.size());
      std::transform(pos.begin(), pos.end(), neg.begin(), [](const Rational& r) { return -r; });
      detail::DivisorContext<Rational> cpos(eta, pos);
      detail::DivisorContext<Rational> cneg(eta, neg);
      auto fp = cpos.f(0, cpos.full_mask());
      auto fn = cneg.f(0, cneg.full_mask());
      auto G = detail::script_g(cpos, cneg, J);
      if (!fp || !fn || !G) return std::nullopt;
      Rational sum_phi = std::accumulate(pos.begin(), pos.end(), Rational(0));
      return *fp - *fn - sum_phi * *G;
    };
    reports.push_back(run_identity("2.22", J, -1, -1, trials, sampler, check));
  }

  // 2.23: g_{J,1} = -(2/eta^J) (1/J!) sum_sigma h_J(phi_sigma).
  for (int J = 1; J <= J_max; ++J) {
    auto check = [J](const Rational& eta,
                     std::span<const Rational> phis) -> std::optional<Rational> {
      detail::DivisorContext<Rational> ctx(eta, {phis.begin(), phis.end()});
      auto g = ctx.g(1, ctx.full_mask());
      if (!g) return std::nullopt;
      std::vector<Rational> perm(phis.begin(), phis.end());
      std::sort(perm.begin(), perm.end());
      Rational hsum(0);
      long nperm = 0;
      do {
        detail::DivisorContext<Rational> hole(eta, perm);
        auto hv = hole.h_full();
        if (!hv) return std::nullopt;
        hsum += *hv;
        ++nperm;
      } while (std::next_permutation(perm.begin(), perm.end()));
      Rational etaJ = 1;
      for (int i = 0; i < J; ++i) etaJ *= eta;
      Rational rhs = Rational(-2) / etaJ * hsum / nperm;
      return *g - rhs;
    };
    reports.push_back(run_identity("2.23", J, -1, -1, trials, sampler, check));
  }

  // Catalan recursion, exact binomials.
  {
    IdentityReport rep;
    rep.identity = "catalan";
    rep.J = J_max;
    rep.trials = J_max;
    rep.max_discrepancy = verify_catalan(J_max) ? 0 : 1;
    if (!rep.passed()) rep.witnesses.push_back("catalan recursion failed");
    reports.push_back(rep);
  }

  return reports;
}

void write_identity_report(std::span<const IdentityReport> reports, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open report file: " + path);
  for (const auto& r : reports) {
    out << "identity=" << r.identity << " J=" << r.J;
    if (r.K >= 0) out << " K=" << r.K;
    if (r.k >= 0) out << " k=" << r.k;
    out << " trials=" << r.trials << " max_discrepancy=" << r.max_discrepancy.str()
        << " status=" << (r.passed() ? "pass" : "fail");
    for (const auto& w : r.witnesses) out << " witness[" << w << "]";
    out << "\n";
  }
}

}  // namespace oscspec
