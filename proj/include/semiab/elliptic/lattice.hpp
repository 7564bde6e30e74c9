#pragma once

#include <array>
#include <complex>
#include <utility>
#include <vector>

#include "semiab/elliptic/curve.hpp"
#include "semiab/numeric.hpp"

namespace semiab::elliptic {

// Period lattice of y^2 = x^3 + a x + b for the uniformisation
// x = wp(z), y = wp'(z)/2, so g2 = -4a and g3 = -4b. The basis is oriented
// with Im(omega2/omega1) > 0 and tau reduced to the fundamental domain;
// eta_k = zeta(z + omega_k) - zeta(z).
template <class R>
struct PeriodLattice {
  using C = std::complex<R>;
  C omega1, omega2, tau;
  C eta1, eta2;
  C g2, g3, discriminant;
  std::array<C, 3> two_torsion_x;  // roots of x^3 + a x + b
  C q;                              // exp(2 pi i tau)
  int precision_bits = 53;
};

template <class R>
PeriodLattice<R> periods(const CurveQ& E, int precision_bits = kDefaultPrecisionBits);

PeriodLattice<double> to_double(const PeriodLattice<Real>& L);

// eta1 omega2 - eta2 omega1 - 2 pi i
template <class R>
std::complex<R> legendre_residual(const PeriodLattice<R>& L);

// z = s omega1 + t omega2 with s, t real.
template <class R>
std::pair<R, R> lattice_coordinates(const PeriodLattice<R>& L, const std::complex<R>& z);
template <class R>
std::complex<R> from_coordinates(const PeriodLattice<R>& L, const R& s, const R& t);

// R-linear extension of the quasi-period map: s eta1 + t eta2.
template <class R>
std::complex<R> eta_hat(const PeriodLattice<R>& L, const std::complex<R>& z);

// Representative with s, t in [0, 1).
template <class R>
std::complex<R> reduce(const PeriodLattice<R>& L, const std::complex<R>& z);
// Representative with s, t in [-1/2, 1/2).
template <class R>
std::complex<R> reduce_centered(const PeriodLattice<R>& L, const std::complex<R>& z);

template <class R>
std::complex<R> add_parameters(const PeriodLattice<R>& L, const std::complex<R>& z1, const std::complex<R>& z2);
template <class R>
std::complex<R> mul_parameter(const PeriodLattice<R>& L, long n, const std::complex<R>& z);

// Weierstrass functions; wp and wp' throw PoleAtLatticePoint on the lattice.
template <class R>
std::complex<R> wp(const PeriodLattice<R>& L, const std::complex<R>& z);
template <class R>
std::complex<R> wp_prime(const PeriodLattice<R>& L, const std::complex<R>& z);
template <class R>
std::complex<R> sigma(const PeriodLattice<R>& L, const std::complex<R>& z);

// Eisenstein series E2, E4, E6 at tau.
template <class R>
std::array<std::complex<R>, 3> eisenstein(const PeriodLattice<R>& L);

// Archimedean Neron function
//   lambda(z) = -log|exp(-z eta_hat(z)/2) sigma(z)| - log|Delta|/12,
// which integrates to 0 against Haar measure and satisfies
//   lambda(2z) = 4 lambda(z) - log|wp'(z)| + log|Delta|/4.
template <class R>
R neron_local_archimedean(const PeriodLattice<R>& L, const std::complex<R>& z);
// The additive constant above, -log|Delta|/12.
template <class R>
R neron_normalization_constant(const PeriodLattice<R>& L);

// (x, y) = (wp(z), wp'(z)/2).
template <class R>
std::pair<std::complex<R>, std::complex<R>> point_from_parameter(const PeriodLattice<R>& L, const std::complex<R>& z);

// Inverse of point_from_parameter, reduced to the fundamental parallelogram.
template <class R>
std::complex<R> elliptic_log(const PeriodLattice<R>& L, const std::complex<R>& x, const std::complex<R>& y);
template <class R>
std::complex<R> elliptic_log(const PeriodLattice<R>& L, const RationalPoint& P);

// (i omega1 + j omega2)/N for 0 <= i, j < N, ordered by (i, j); the
// primitive filter keeps gcd(i, j, N) = 1.
template <class R>
std::vector<std::complex<R>> torsion_parameters(const PeriodLattice<R>& L, int N, bool primitive = false);

std::size_t primitive_torsion_count(int N);

}  // namespace semiab::elliptic
