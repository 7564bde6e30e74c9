#pragma once

#include <cstddef>

#include "semiab/dynamic_metric.hpp"
#include "semiab/elliptic/curve.hpp"

namespace semiab::elliptic {

// (1/2) log max(|p|, |q|) for x(P) = p/q; 0 at the identity.
double naive_height(const RationalPoint& P);

// Neron-Tate height normalised as lim 4^-k (1/2) h(x([2^k] P)).
//
// Evaluated as the telescoped Tate series on an integral model: the k-th
// step contributes the archimedean defect of the doubling quartics at the
// real iterate x_k minus log gcd(N_k, D_k), where the gcd divides the
// resultant R of the doubling forms and is obtained exactly from the
// numerators kept modulo a power of R. The series is truncated once the
// tail bound falls below 2^-precision_bits.
Real neron_tate_mp(const CurveQ& E, const RationalPoint& P, int precision_bits = kDefaultPrecisionBits);
double neron_tate(const CurveQ& E, const RationalPoint& P, int precision_bits = kDefaultPrecisionBits);

// Resultant of the doubling forms F = A^4 - 2aA^2B^2 - 8bAB^3 + a^2B^4 and
// G = 4A^3B + 4aAB^3 + 4bB^4 for integral a, b.
Integer doubling_resultant(const Integer& a, const Integer& b);

struct ExactTateOptions {
  double tolerance = 1e-6;
  int max_iterations = 12;
  // Bit length of the x-coordinate numerator beyond which doubling stops.
  std::size_t max_coordinate_bits = std::size_t{1} << 23;
};

// The doubling map with the naive height, as a problem for the generic
// engine. Throws CoordinateOverflow once an iterate exceeds the bit cap.
dynamics::DynamicalHeightProblem<RationalPoint> doubling_problem(const CurveQ& E, const ExactTateOptions& opts = {});

// tate_limit of doubling_problem; exact rational iterates only.
dynamics::TateLimitResult exact_tate_limit(const CurveQ& E, const RationalPoint& P, const ExactTateOptions& opts = {});

}  // namespace semiab::elliptic
