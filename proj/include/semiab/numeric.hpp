#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <type_traits>

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

namespace semiab {

namespace mp = boost::multiprecision;

using Integer = mp::mpz_int;
using Rational = mp::mpq_rational;

// Variable-precision binary float. Expression templates are off so the type
// composes with std::complex.
using Real = mp::number<mp::mpfr_float_backend<0>, mp::et_off>;
using Complex = std::complex<Real>;

inline constexpr int kDefaultPrecisionBits = 128;

inline unsigned bits_to_digits10(int bits) {
  return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

// Sets the default MPFR precision for the lifetime of the guard.
class PrecisionGuard {
 public:
  explicit PrecisionGuard(int bits) : saved_(Real::default_precision()) {
    Real::default_precision(bits_to_digits10(bits));
  }
  ~PrecisionGuard() { Real::default_precision(saved_); }
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  unsigned saved_;
};

template <class R>
struct is_multiprecision : std::false_type {};
template <>
struct is_multiprecision<Real> : std::true_type {};

// No-op for double; sets MPFR precision for Real.
template <class R>
class ScopedPrecision {
 public:
  explicit ScopedPrecision(int bits) {
    if constexpr (is_multiprecision<R>::value) {
      saved_ = Real::default_precision();
      Real::default_precision(bits_to_digits10(bits));
    }
  }
  ~ScopedPrecision() {
    if constexpr (is_multiprecision<R>::value) Real::default_precision(saved_);
  }
  ScopedPrecision(const ScopedPrecision&) = delete;
  ScopedPrecision& operator=(const ScopedPrecision&) = delete;

 private:
  unsigned saved_ = 0;
};

template <class R>
R pi() {
  if constexpr (std::is_same_v<R, double>) {
    return 3.14159265358979323846264338327950288;
  } else {
    R r;
    mpfr_const_pi(r.backend().data(), MPFR_RNDN);
    return r;
  }
}

template <class R>
std::complex<R> imag_unit() {
  return std::complex<R>(R(0), R(1));
}

inline double to_double(const Real& x) { return x.convert_to<double>(); }
inline double to_double(double x) { return x; }
inline std::complex<double> to_double(const Complex& z) {
  return {z.real().convert_to<double>(), z.imag().convert_to<double>()};
}
inline std::complex<double> to_double(const std::complex<double>& z) { return z; }

template <class R>
R from_rational(const Rational& q) {
  if constexpr (std::is_same_v<R, double>) {
    return q.convert_to<double>();
  } else {
    return R(q);
  }
}

// log|n| for a big integer without materialising a float of its full size.
inline double log_abs(const Integer& n) {
  if (n == 0) return -INFINITY;
  long exponent = 0;
  double mant = mpz_get_d_2exp(&exponent, n.backend().data());
  return std::log(std::fabs(mant)) + static_cast<double>(exponent) * 0.69314718055994530942;
}

inline std::size_t bit_length(const Integer& n) {
  if (n == 0) return 0;
  return mpz_sizeinbase(n.backend().data(), 2);
}

inline Real log_abs_real(const Integer& n) {
  Real x(n);
  return log(abs(x));
}

}  // namespace semiab
