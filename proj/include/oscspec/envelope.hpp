#pragma once

// Decaying bounded-variation envelopes gamma(x) on [0, inf). The families are
// closed-form so total variation and L^p tails are exact:
//   power-decay   (1 + x/x0)^(-beta),  x0 > 0, beta > 0
//   exponential   exp(-beta x),        beta > 0
//   step-train    piecewise constant with finitely many breakpoints,
//                 final value 0
//   zero          identically 0

#include <string>
#include <vector>

namespace oscspec {

enum class EnvelopeKind { PowerDecay, Exponential, StepTrain, Zero };

class Envelope {
 public:
  static Envelope power_decay(double x0, double beta);
  static Envelope exponential(double beta);
  // values[i] holds on [break_{i-1}, break_i) with break_{-1} = 0 and
  // break_{m-1} = +inf; the final value must be 0.
  static Envelope step_train(std::vector<double> breakpoints, std::vector<double> values);
  static Envelope zero();

  double operator()(double x) const;

  // Var(gamma, [a, inf)); closed form for every kind.
  double variation_from(double a) const;
  double total_variation() const { return variation_from(0.0); }

  // integral_a^inf |gamma(x)|^p dx; +inf when the tail does not decay fast
  // enough (power-decay with beta * p <= 1).
  double lp_tail(double a, int p) const;

  // sum_{n >= m} |gamma(n+1) - gamma(n)| over integer n.
  double discrete_variation_from(long m) const;

  EnvelopeKind kind() const { return kind_; }
  double x0() const { return x0_; }      // power-decay scale
  double beta() const { return beta_; }  // power exponent / exponential rate
  const std::vector<double>& breakpoints() const { return breaks_; }
  std::string describe() const;

  bool operator==(const Envelope& other) const;

 private:
  Envelope() = default;

  EnvelopeKind kind_ = EnvelopeKind::Zero;
  double x0_ = 1.0;
  double beta_ = 1.0;
  std::vector<double> breaks_;
  std::vector<double> values_;
};

}  // namespace oscspec
