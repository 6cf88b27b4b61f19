#include "oscspec/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace oscspec {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string("envelope: non-finite ") + what);
}
}  // namespace

Envelope Envelope::power_decay(double x0, double beta) {
  require_finite(x0, "x0");
  require_finite(beta, "beta");
  if (x0 <= 0.0) throw std::invalid_argument("envelope: power-decay requires x0 > 0");
  if (beta <= 0.0) throw std::invalid_argument("envelope: power-decay requires beta > 0");
  Envelope e;
  e.kind_ = EnvelopeKind::PowerDecay;
  e.x0_ = x0;
  e.beta_ = beta;
  return e;
}

Envelope Envelope::exponential(double beta) {
  require_finite(beta, "beta");
  if (beta <= 0.0) throw std::invalid_argument("envelope: exponential requires beta > 0");
  Envelope e;
  e.kind_ = EnvelopeKind::Exponential;
  e.beta_ = beta;
  return e;
}

Envelope Envelope::step_train(std::vector<double> breakpoints, std::vector<double> values) {
  if (values.size() != breakpoints.size() + 1)
    throw std::invalid_argument("envelope: step-train needs one more value than breakpoints");
  if (values.empty() || values.back() != 0.0)
    throw std::invalid_argument("envelope: step-train final value must be 0");
  double prev = 0.0;
  for (double b : breakpoints) {
    require_finite(b, "breakpoint");
    if (b <= prev) throw std::invalid_argument("envelope: breakpoints must be positive increasing");
    prev = b;
  }
  for (double v : values) require_finite(v, "value");
  Envelope e;
  e.kind_ = EnvelopeKind::StepTrain;
  e.breaks_ = std::move(breakpoints);
  e.values_ = std::move(values);
  return e;
}

Envelope Envelope::zero() { return Envelope(); }

double Envelope::operator()(double x) const {
  switch (kind_) {
    case EnvelopeKind::PowerDecay:
      return std::pow(1.0 + x / x0_, -beta_);
    case EnvelopeKind::Exponential:
      return std::exp(-beta_ * x);
    case EnvelopeKind::StepTrain: {
      auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
      return values_[static_cast<std::size_t>(it - breaks_.begin())];
    }
    case EnvelopeKind::Zero:
      return 0.0;
  }
  return 0.0;
}

double Envelope::variation_from(double a) const {
  switch (kind_) {
    case EnvelopeKind::PowerDecay:
    case EnvelopeKind::Exponential:
      // monotone decreasing to 0, so the tail variation is the value itself
      return (*this)(a);
    case EnvelopeKind::StepTrain: {
      double var = 0.0;
      double cur = (*this)(a);
      for (std::size_t i = 0; i < breaks_.size(); ++i) {
        if (breaks_[i] <= a) continue;
        var += std::fabs(values_[i + 1] - cur);
        cur = values_[i + 1];
      }
      return var;
    }
    case EnvelopeKind::Zero:
      return 0.0;
  }
  return 0.0;
}

double Envelope::lp_tail(double a, int p) const {
  if (p < 1) throw std::invalid_argument("envelope: lp_tail requires p >= 1");
  if (a < 0.0) a = 0.0;
  switch (kind_) {
    case EnvelopeKind::PowerDecay: {
      double q = beta_ * p;
      if (q <= 1.0) return kInf;
      return x0_ / (q - 1.0) * std::pow(1.0 + a / x0_, 1.0 - q);
    }
    case EnvelopeKind::Exponential:
      return std::exp(-p * beta_ * a) / (p * beta_);
    case EnvelopeKind::StepTrain: {
      double acc = 0.0;
      double lo = a;
      for (std::size_t i = 0; i < breaks_.size(); ++i) {
        double hi = breaks_[i];
        if (hi > lo) acc += std::pow(std::fabs(values_[i]), p) * (hi - lo);
        lo = std::max(lo, hi);
      }
      // final segment has value 0
      return acc;
    }
    case EnvelopeKind::Zero:
      return 0.0;
  }
  return 0.0;
}

double Envelope::discrete_variation_from(long m) const {
  if (m < 0) m = 0;
  switch (kind_) {
    case EnvelopeKind::PowerDecay:
    case EnvelopeKind::Exponential:
      // monotone to 0: the differences telescope
      return (*this)(static_cast<double>(m));
    case EnvelopeKind::StepTrain: {
      long last = m;
      if (!breaks_.empty())
        last = std::max(last, static_cast<long>(std::ceil(breaks_.back())) + 1);
      double var = 0.0;
      for (long n = m; n < last; ++n)
        var += std::fabs((*this)(static_cast<double>(n + 1)) - (*this)(static_cast<double>(n)));
      return var;
    }
    case EnvelopeKind::Zero:
      return 0.0;
  }
  return 0.0;
}

bool Envelope::operator==(const Envelope& other) const {
  if (kind_ != other.kind_) return false;
  switch (kind_) {
    case EnvelopeKind::PowerDecay:
      return x0_ == other.x0_ && beta_ == other.beta_;
    case EnvelopeKind::Exponential:
      return beta_ == other.beta_;
    case EnvelopeKind::StepTrain:
      return breaks_ == other.breaks_ && values_ == other.values_;
    case EnvelopeKind::Zero:
      return true;
  }
  return false;
}

std::string Envelope::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case EnvelopeKind::PowerDecay:
      os << "power-decay(x0=" << x0_ << ",beta=" << beta_ << ")";
      break;
    case EnvelopeKind::Exponential:
      os << "exponential(beta=" << beta_ << ")";
      break;
    case EnvelopeKind::StepTrain:
      os << "step-train(" << breaks_.size() << " breakpoints)";
      break;
    case EnvelopeKind::Zero:
      os << "zero";
      break;
  }
  return os.str();
}

}  // namespace oscspec
