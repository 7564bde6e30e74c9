#pragma once

#include <string>

#include "semiab/numeric.hpp"

namespace semiab::elliptic {

// y^2 = x^3 + a x + b over Q.
class CurveQ {
 public:
  CurveQ(Rational a, Rational b);

  const Rational& a() const { return a_; }
  const Rational& b() const { return b_; }
  // -16 (4 a^3 + 27 b^2)
  Rational discriminant() const;
  std::string to_string() const;

  friend bool operator==(const CurveQ&, const CurveQ&) = default;

 private:
  Rational a_, b_;
};

struct RationalPoint {
  Rational x, y;
  bool infinity = true;

  static RationalPoint identity() { return {}; }
  static RationalPoint affine(Rational x, Rational y) { return {std::move(x), std::move(y), false}; }

  friend bool operator==(const RationalPoint&, const RationalPoint&) = default;
};

bool on_curve(const CurveQ& E, const RationalPoint& P);
// Throws InvalidArgument unless P lies on E.
void require_on_curve(const CurveQ& E, const RationalPoint& P);

RationalPoint negate(const RationalPoint& P);
RationalPoint add(const CurveQ& E, const RationalPoint& P, const RationalPoint& Q);
RationalPoint sub(const CurveQ& E, const RationalPoint& P, const RationalPoint& Q);
RationalPoint double_point(const CurveQ& E, const RationalPoint& P);
RationalPoint mul(const CurveQ& E, long n, const RationalPoint& P);

// Exact order of P, or 0 when P has infinite order. Rational torsion has
// order at most 12, so checking multiples up to 12 decides.
int torsion_order(const CurveQ& E, const RationalPoint& P);

// Isomorphic model y^2 = x^3 + A x + B with A, B integers, via
// (x, y) -> (u^2 x, u^3 y).
struct IntegralModel {
  Integer A, B, u;
  CurveQ curve() const { return CurveQ(Rational(A), Rational(B)); }
  RationalPoint map(const RationalPoint& P) const;
};

IntegralModel integral_model(const CurveQ& E);

}  // namespace semiab::elliptic
