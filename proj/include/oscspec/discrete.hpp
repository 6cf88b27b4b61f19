#pragma once

// Discrete Prufer recursion, unified for OPUC (c = 0) and OPRL (c = 1):
//
//   r_{n+1}/r_n = |1 - alpha_n e^{i[(n+1)eta + 2 theta_n]} - c conj(alpha_n)|
//                 / sqrt((1 - c alpha_n)(1 - c conj(alpha_n)) - |alpha_n|^2)
//   e^{2i(theta_{n+1} - theta_n)}
//               = (1 - conj(alpha_n) e^{-i[(n+1)eta + 2 theta_n]} - c alpha_n)
//                 / (1 - alpha_n e^{i[(n+1)eta + 2 theta_n]} - c conj(alpha_n))
//
// For OPUC alpha_n are Verblunsky coefficients; for OPRL
//   alpha_n = (a_n^2 - 1 + e^{i eta/2} b_{n+1}) / (e^{i eta} - 1).
// The OPUC amplitude is validated against the Szego recursion
// Phi_{n+1} = z Phi_n - conj(alpha_n) Phi_n^* at z = e^{i eta}, through the
// exact correspondence e^{-i[(n+1)eta + 2 theta_n]} = z^{-1} Phi_n^* / Phi_n
// (theta_0 = 0, Phi_0 = Phi_0^* = 1), which gives
//   log r_n = log|Phi_n| - (1/2) sum_{k<n} log(1 - |alpha_k|^2).

#include "oscspec/envelope.hpp"

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

namespace oscspec {

struct RadicandError : std::runtime_error {
  RadicandError(int index, double value);
  int n;
  double radicand;
};

struct DiscreteTerm {
  std::complex<double> c{0.0, 0.0};
  double phi = 0.0;
  Envelope envelope = Envelope::zero();  // gamma^(l)_n = envelope(n)
};

class CoeffSequence {
 public:
  enum class Origin { OpucDirect, OprlDerived };

  // Raw Verblunsky coefficients; requires |alpha_n| < 1.
  static CoeffSequence opuc(std::vector<std::complex<double>> alphas);

  // Structured alpha_n = sum_l c_l e^{-i n phi_l} gamma^(l)_n, materialized
  // for n = 0..n_values-1; requires |alpha_n| < 1.
  static CoeffSequence opuc_structured(std::vector<DiscreteTerm> terms, int n_values);

  // Jacobi coefficients a_0..a_{N-1} (> 0) and b_0..b_N; alpha_n is formed at
  // the working eta. (b_0 is unused; the recursion consumes b_{n+1}.)
  static CoeffSequence oprl(std::vector<double> a, std::vector<double> b);

  Origin origin() const { return origin_; }
  std::size_t size() const { return n_; }
  std::complex<double> alpha(int n, double eta) const;
  const std::vector<DiscreteTerm>& structured_terms() const { return terms_; }
  bool structured() const { return !terms_.empty(); }

 private:
  CoeffSequence() = default;
  Origin origin_ = Origin::OpucDirect;
  std::size_t n_ = 0;
  std::vector<std::complex<double>> alphas_;
  std::vector<double> a_, b_;
  std::vector<DiscreteTerm> terms_;
};

// alpha_n = (a_n^2 - 1 + e^{i eta/2} b_next) / (e^{i eta} - 1); pole at eta in 2 pi Z.
std::complex<double> oprl_alpha(double a_n, double b_next, double eta);

struct StepResult {
  double log_ratio = 0.0;
  double theta_next = 0.0;
};

// One discrete Prufer step; c selects OPUC (0) or OPRL (1). Throws
// RadicandError when the square-root argument is not positive (eta outside
// the valid spectral window for these coefficients).
StepResult prufer_step(std::complex<double> alpha, double eta, int n, double theta, int c);

struct DiscreteTrajectory {
  double eta = 0.0;
  int c = 0;
  std::vector<double> log_r;  // log r_0 = 0
  std::vector<double> theta;
};

DiscreteTrajectory run_discrete(const CoeffSequence& seq, double eta, double theta0);

// max over n <= N of |log r_n + (1/2) sum_{k<n} log(1-|alpha_k|^2) - log|Phi_n||.
double szego_compare(const CoeffSequence& seq, double eta, int N);

struct SumBoundResult {
  double lhs = 0.0;
  double rhs = 0.0;  // 2 tau^{s+t}, tau the max tail variation from M
};

// Telescoping sum bound for the structured representation: plus_terms pick
// factors gamma^(k_i) e^{-i n phi}, minus_terms conjugated factors with
// negated frequencies; theta_n comes from run_discrete on the same sequence.
SumBoundResult discrete_sum_bound_check(const CoeffSequence& seq, std::span<const int> plus_terms,
                                        std::span<const int> minus_terms, int k, double eta,
                                        int M, int N);

}  // namespace oscspec
