#pragma once

#include <cmath>
#include <complex>
#include <utility>

#include "semiab/numeric.hpp"

// Elementary complex functions written against the real-scalar interface so
// they work for double and for Real alike.
namespace semiab::cmath {

template <class R>
void upgrade(R& x) {
  if constexpr (is_multiprecision<R>::value) x.precision(Real::default_precision());
}

template <class R>
void upgrade(std::complex<R>& z) {
  if constexpr (is_multiprecision<R>::value) {
    R re = z.real(), im = z.imag();
    re.precision(Real::default_precision());
    im.precision(Real::default_precision());
    z = std::complex<R>(re, im);
  }
}

template <class R>
R abs(const std::complex<R>& z) {
  using std::abs;
  using std::sqrt;
  R a = abs(z.real()), b = abs(z.imag());
  if (a < b) std::swap(a, b);
  if (a == 0) return a;
  const R r = b / a;
  return a * sqrt(1 + r * r);
}

template <class R>
R norm(const std::complex<R>& z) {
  return z.real() * z.real() + z.imag() * z.imag();
}

template <class R>
R arg(const std::complex<R>& z) {
  using std::atan2;
  return atan2(z.imag(), z.real());
}

template <class R>
std::complex<R> exp(const std::complex<R>& z) {
  using std::cos;
  using std::exp;
  using std::sin;
  const R m = exp(z.real());
  return {m * cos(z.imag()), m * sin(z.imag())};
}

template <class R>
std::complex<R> log(const std::complex<R>& z) {
  using std::log;
  return {log(abs(z)), arg(z)};
}

template <class R>
std::complex<R> sqrt(const std::complex<R>& z) {
  using std::abs;
  using std::sqrt;
  const R r = abs(z);
  if (r == 0) return {R(0), R(0)};
  const R x = z.real(), y = z.imag();
  const R t = sqrt((r + abs(x)) / 2);
  if (x >= 0) return {t, y / (2 * t)};
  return {abs(y) / (2 * t), y < 0 ? R(-t) : t};
}

template <class R>
std::complex<R> sin(const std::complex<R>& z) {
  using std::cos;
  using std::cosh;
  using std::sin;
  using std::sinh;
  return {sin(z.real()) * cosh(z.imag()), cos(z.real()) * sinh(z.imag())};
}

template <class R>
std::complex<R> cos(const std::complex<R>& z) {
  using std::cos;
  using std::cosh;
  using std::sin;
  using std::sinh;
  return {cos(z.real()) * cosh(z.imag()), -(sin(z.real()) * sinh(z.imag()))};
}

template <class R>
R two_pow(int e) {
  using std::ldexp;
  return ldexp(R(1), e);
}

template <class R>
std::complex<R> from_mp(const Complex& z) {
  if constexpr (std::is_same_v<R, double>) {
    return to_double(z);
  } else {
    std::complex<R> w(z.real(), z.imag());
    upgrade(w);
    return w;
  }
}

}  // namespace semiab::cmath
