#include "semiab/elliptic/curve.hpp"

#include "semiab/error.hpp"

namespace semiab::elliptic {

CurveQ::CurveQ(Rational a, Rational b) : a_(std::move(a)), b_(std::move(b)) {
  if (4 * a_ * a_ * a_ + 27 * b_ * b_ == 0)
    throw Error(ErrorKind::SingularCurve, "curve " + to_string() + " has zero discriminant");
}

Rational CurveQ::discriminant() const { return -16 * (4 * a_ * a_ * a_ + 27 * b_ * b_); }

std::string CurveQ::to_string() const {
  return "y^2 = x^3 + (" + a_.str() + ") x + (" + b_.str() + ")";
}

bool on_curve(const CurveQ& E, const RationalPoint& P) {
  if (P.infinity) return true;
  return P.y * P.y == P.x * P.x * P.x + E.a() * P.x + E.b();
}

void require_on_curve(const CurveQ& E, const RationalPoint& P) {
  if (!on_curve(E, P))
    throw Error(ErrorKind::InvalidArgument, "point (" + P.x.str() + ", " + P.y.str() + ") is not on " + E.to_string());
}

RationalPoint negate(const RationalPoint& P) {
  if (P.infinity) return P;
  return RationalPoint::affine(P.x, -P.y);
}

RationalPoint add(const CurveQ& E, const RationalPoint& P, const RationalPoint& Q) {
  if (P.infinity) return Q;
  if (Q.infinity) return P;
  Rational slope;
  if (P.x == Q.x) {
    if (P.y != Q.y || P.y == 0) return RationalPoint::identity();
    slope = (3 * P.x * P.x + E.a()) / (2 * P.y);
  } else {
    slope = (Q.y - P.y) / (Q.x - P.x);
  }
  Rational x = slope * slope - P.x - Q.x;
  Rational y = slope * (P.x - x) - P.y;
  return RationalPoint::affine(std::move(x), std::move(y));
}

RationalPoint sub(const CurveQ& E, const RationalPoint& P, const RationalPoint& Q) { return add(E, P, negate(Q)); }

RationalPoint double_point(const CurveQ& E, const RationalPoint& P) { return add(E, P, P); }

RationalPoint mul(const CurveQ& E, long n, const RationalPoint& P) {
  RationalPoint base = n < 0 ? negate(P) : P;
  unsigned long k = n < 0 ? static_cast<unsigned long>(-(n + 1)) + 1 : static_cast<unsigned long>(n);
  RationalPoint acc = RationalPoint::identity();
  while (k) {
    if (k & 1) acc = add(E, acc, base);
    k >>= 1;
    if (k) base = double_point(E, base);
  }
  return acc;
}

int torsion_order(const CurveQ& E, const RationalPoint& P) {
  RationalPoint Q = P;
  for (int n = 1; n <= 12; ++n) {
    if (Q.infinity) return n;
    Q = add(E, Q, P);
  }
  return 0;
}

RationalPoint IntegralModel::map(const RationalPoint& P) const {
  if (P.infinity) return P;
  const Rational u2(u * u), u3(u * u * u);
  return RationalPoint::affine(P.x * u2, P.y * u3);
}

IntegralModel integral_model(const CurveQ& E) {
  // smallest u with u^4 a and u^6 b integral: for each prime power in the
  // denominators this is a ceiling division; search over divisors of the
  // product of denominators is cheap at desk scale.
  const Integer da = mp::denominator(E.a()), db = mp::denominator(E.b());
  const Integer bound = da * db;
  Integer u = 1;
  for (;; ++u) {
    const Rational A = E.a() * Rational(u * u * u * u);
    const Rational B = E.b() * Rational(u * u * u * u * u * u);
    if (mp::denominator(A) == 1 && mp::denominator(B) == 1) {
      return {mp::numerator(A), mp::numerator(B), u};
    }
    if (u > bound) break;
  }
  throw Error(ErrorKind::InvalidArgument, "no integral model found");
}

}  // namespace semiab::elliptic
