#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

namespace oscspec {

using BigInt = boost::multiprecision::cpp_int;

// Exact rational scalar: canonical form with positive denominator and
// gcd(num, den) = 1 is maintained by the backend.
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline std::string to_string(const Rational& r) { return r.str(); }

// Thrown when an exact evaluation hits a vanishing small divisor.
class PoleError : public std::runtime_error {
 public:
  PoleError(std::string what, Rational denominator)
      : std::runtime_error(std::move(what)), denominator_(std::move(denominator)) {}

  const Rational& denominator() const { return denominator_; }

 private:
  Rational denominator_;
};

inline BigInt binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  BigInt r = 1;
  for (unsigned i = 0; i < k; ++i) {
    r *= n - i;
    r /= i + 1;
  }
  return r;
}

// Random rationals with numerator/denominator bounded by 10^3; the bound
// keeps bit sizes small through the recursive function algebra.
class RationalSampler {
 public:
  explicit RationalSampler(std::uint64_t seed) : rng_(seed) {}

  Rational next(long max_abs_num = 1000, long max_den = 1000) {
    std::uniform_int_distribution<long> num(-max_abs_num, max_abs_num);
    std::uniform_int_distribution<long> den(1, max_den);
    return Rational(num(rng_), den(rng_));
  }

  Rational next_positive(long max_num = 1000, long max_den = 1000) {
    std::uniform_int_distribution<long> num(1, max_num);
    std::uniform_int_distribution<long> den(1, max_den);
    return Rational(num(rng_), den(rng_));
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace oscspec
