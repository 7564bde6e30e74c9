#pragma once

#include <complex>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "semiab/numeric.hpp"

namespace semiab::algnum {

// Integer polynomial a_0 x^d + a_1 x^(d-1) + ... + a_d, stored highest degree
// first. Construction normalises to a primitive polynomial with positive
// leading coefficient.
class IntPoly {
 public:
  explicit IntPoly(std::vector<Integer> coefficients);

  // "a_0 x^d + ... + a_d", e.g. "x^2 - x - 1", "2*x - 3", "-x^3+2".
  static IntPoly parse(std::string_view text);

  int degree() const { return static_cast<int>(coefficients_.size()) - 1; }
  const std::vector<Integer>& coefficients() const { return coefficients_; }
  const Integer& leading() const { return coefficients_.front(); }
  const Integer& constant() const { return coefficients_.back(); }

  // Polynomial with coefficients in the opposite order (roots inverted).
  IntPoly reversed() const;
  bool is_squarefree() const;
  std::string to_string() const;

  Complex evaluate(const Complex& x) const;
  Integer evaluate(const Integer& x) const;

  friend bool operator==(const IntPoly&, const IntPoly&) = default;

 private:
  std::vector<Integer> coefficients_;
};

// Coefficient-level helpers over Z[x], highest degree first.
std::vector<Integer> poly_derivative(const std::vector<Integer>& p);
// Primitive gcd over Q[x], normalised to positive leading coefficient.
std::vector<Integer> poly_gcd(const std::vector<Integer>& a, const std::vector<Integer>& b);
std::vector<Integer> poly_exact_div(const std::vector<Integer>& a, const std::vector<Integer>& b);

// All d complex roots of a squarefree polynomial, each certified to lie within
// 2^-precision_bits of a distinct true root. Ordered by real part ascending,
// then imaginary part descending, after rounding to the precision grid.
std::vector<Complex> complex_roots(const IntPoly& p, int precision_bits = kDefaultPrecisionBits);

class AlgebraicNumber {
 public:
  AlgebraicNumber(IntPoly min_poly, int embedding_index,
                  int precision_bits = kDefaultPrecisionBits);

  static AlgebraicNumber rational(const Integer& p, const Integer& q,
                                  int precision_bits = kDefaultPrecisionBits);

  const IntPoly& min_poly() const { return min_poly_; }
  int embedding_index() const { return embedding_index_; }
  int precision_bits() const { return precision_bits_; }
  int degree() const { return min_poly_.degree(); }
  bool is_zero() const;

  // The full conjugate set, the Galois-orbit proxy.
  const std::vector<Complex>& conjugates() const { return *roots_; }
  const Complex& value() const { return (*roots_)[static_cast<std::size_t>(embedding_index_)]; }
  std::complex<double> value_double() const { return to_double(value()); }

  AlgebraicNumber inverse() const;
  // Same number field element under embedding k; shares the conjugate set.
  AlgebraicNumber conjugate(int k) const;

 private:
  IntPoly min_poly_;
  int embedding_index_;
  int precision_bits_;
  std::shared_ptr<const std::vector<Complex>> roots_;
};

// log of the Mahler measure, log|a_0| + sum log max(1, |alpha_i|).
Real log_mahler_measure(const IntPoly& p, int precision_bits = kDefaultPrecisionBits);

// Absolute logarithmic Weil height, (1/d) log M(min_poly).
Real weil_height_mp(const AlgebraicNumber& alpha);
double weil_height(const AlgebraicNumber& alpha);

// Canonical height for the divisor [0] + [infinity] on P^1: h(alpha) + h(1/alpha).
Real toric_canonical_height_mp(const AlgebraicNumber& alpha);
double toric_canonical_height(const AlgebraicNumber& alpha);

int euler_phi(int n);
std::vector<std::complex<double>> primitive_roots_of_unity(int n);
IntPoly cyclotomic_polynomial(int n);

// Minimal polynomial of alpha^n for alpha a root of the irreducible p.
// Exact: characteristic polynomial of the n-th power of the companion matrix,
// reduced to its squarefree primitive part.
IntPoly power_minimal_polynomial(const IntPoly& p, int n);

}  // namespace semiab::algnum
