#pragma once

// Modified Prufer variables for  -u'' + V u = E u  at E = eta^2/4:
//     u  = R sin(eta x / 2 + theta),   u' = (eta/2) R cos(eta x / 2 + theta),
//     theta'    = (V/eta) (cos(eta x + 2 theta) - 1)
//     (log R)'  = (V/eta) sin(eta x + 2 theta)
// integrated with an adaptive Dormand-Prince 5(4) pair, plus the raw
// Schrodinger equation as an independent oracle and the oscillatory-integral
// bound check
//     | int_a^b ((phi - K eta) - 2 K theta') e^{iK(eta x + 2 theta)} e^{-i phi x} Gamma | <= 2 prod Var(gamma_i, [a, inf)).

#include "oscspec/potential.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace oscspec {

struct StepFailure : std::runtime_error {
  explicit StepFailure(double where);
  double x;
};

struct DegenerateState : std::runtime_error {
  explicit DegenerateState(double where);
  double x;
};

struct IntegratorDiagnostics {
  long accepted = 0;
  long rejected = 0;
  double max_local_error = 0.0;  // max local error per unit step over accepted steps
};

struct PruferSample {
  double x;
  double logR;
  double theta;
};

struct PruferTrajectory {
  double eta = 0.0;
  double theta0 = 0.0;
  double tol = 0.0;
  std::vector<PruferSample> samples;  // x strictly increasing, logR(0) = 0
  IntegratorDiagnostics diag;

  // logR at a recorded sample point (checkpoints land exactly on samples).
  double logR_at(double x) const;
  // sup over samples with x >= x_mid of |logR(x) - logR(x_mid_sample)|.
  double tail_sup(double x_mid) const;
};

// theta0 is a free input: the bounded/unbounded dichotomy is boundary-
// condition independent. Checkpoints, if given, are landed on exactly.
PruferTrajectory integrate_prufer(const Potential& pot, double eta, double x_max, double theta0,
                                  double tol, std::span<const double> checkpoints = {});

struct SolutionSample {
  double x;
  double u;
  double du;
};

struct SolutionTrajectory {
  double E = 0.0;
  std::vector<SolutionSample> samples;
  IntegratorDiagnostics diag;
};

SolutionTrajectory integrate_schrodinger(const Potential& pot, double E, double x_max, double u0,
                                         double du0, double tol,
                                         std::span<const double> checkpoints = {});

// Converts a sampled solution to Prufer form: R = sqrt((2u'/eta)^2 + u^2),
// theta the continuous branch of atan2(u, 2u'/eta) - eta x/2 with per-sample
// increments in (-pi, pi]; logR renormalized to 0 at the first sample.
PruferTrajectory prufer_from_solution(const SolutionTrajectory& traj, double eta);

struct OscBoundResult {
  double lhs = 0.0;
  double rhs = 0.0;
};

// Quadrature of the oscillatory integral for the tuple's envelope product
// (phases folded in through phi = sum of the tuple's frequencies), with theta
// driven by the same potential; rhs is 2 prod Var(gamma_i, [a, inf)).
OscBoundResult osc_integral_bound_check(const Potential& pot, std::span<const int> tuple, int K,
                                        double eta, double a, double b, double tol);

}  // namespace oscspec
