#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "semiab/algnum.hpp"
#include "semiab/elliptic/curve.hpp"
#include "semiab/elliptic/lattice.hpp"

// Extension 0 -> Gm -> G -> E -> 0 realised as G(C) = (C x C^*) / Lambda with
// lambda . (z, w) = (z + lambda, a(lambda) w),  a(lambda) = exp(eta_hat(lambda) u).
namespace semiab::semi {

using C = std::complex<double>;
using elliptic::CurveQ;
using elliptic::PeriodLattice;
using elliptic::RationalPoint;

struct GModel {
  CurveQ curve{Rational(-1), Rational(0)};
  PeriodLattice<double> lattice;
  C u;
  C eta1u, eta2u;  // exponents of a(omega1), a(omega2)
  bool split = false;
  std::optional<RationalPoint> class_point;  // rational point with elliptic log u, when known
  int rank = 1;
  int precision_bits = kDefaultPrecisionBits;
  std::uint64_t tag = 0;
};

struct GPoint {
  C z;
  C w{1.0, 0.0};
  std::uint64_t model_tag = 0;
};

// Coordinates on G(C) that are invariant under the lattice action:
// z = s omega1 + t omega2 with s, t in [0, 1), v = w exp(-eta_hat(z) u).
struct TorusCoords {
  double s = 0, t = 0;
  C v{1.0, 0.0};
};

GModel build_extension(const CurveQ& E, C u, int precision_bits = kDefaultPrecisionBits);
GModel build_extension(const CurveQ& E, const RationalPoint& Q, int precision_bits = kDefaultPrecisionBits);
// u = s omega1 + t omega2.
GModel build_extension_coords(const CurveQ& E, double s, double t, int precision_bits = kDefaultPrecisionBits);

C automorphy_exponent(const GModel& m, C lambda);  // eta_hat(lambda) u
C automorphy_factor(const GModel& m, C lambda);    // a(lambda)
// |a(w1 + w2) - a(w1) a(w2)| relative, in exponent arithmetic.
double cocycle_residual(const GModel& m);

GPoint identity(const GModel& m);
GPoint make_point(const GModel& m, C z, C w);  // reduced
GPoint reduce(const GModel& m, const GPoint& p);
GPoint from_coords(const GModel& m, const TorusCoords& c);
TorusCoords coords(const GModel& m, const GPoint& p);

GPoint g_add(const GModel& m, const GPoint& p, const GPoint& q);
GPoint g_neg(const GModel& m, const GPoint& p);
GPoint g_sub(const GModel& m, const GPoint& p, const GPoint& q);
GPoint g_mul(const GModel& m, long n, const GPoint& p);
bool same_point(const GModel& m, const GPoint& p, const GPoint& q, double tol = 1e-9);

// lambda_G(z, w) = log|w| - Re(eta_hat(z) u)
double weil_lambda(const GModel& m, const GPoint& p);
double archimedean_fiber_height(const GModel& m, const GPoint& p);
double canonical_height_fiber0(const algnum::AlgebraicNumber& alpha);

// Neron-Tate height of the extension class under E = E^dual; zero for torsion
// classes, UnsupportedPointClass when u is neither torsion nor a known rational point.
double class_height(const GModel& m);

struct TorsionIndex {
  int N, i, j, k;
};
TorsionIndex torsion_index(int N, std::size_t flat);  // flat = (i N + j) N + k
GPoint torsion_point(const GModel& m, const TorsionIndex& idx);
std::vector<GPoint> torsion_points_G(int N, const GModel& m, bool primitive = false);
std::size_t primitive_torsion_count_G(int N);
bool is_primitive(const TorsionIndex& idx);

std::vector<GPoint> max_compact_sample(std::size_t count, const GModel& m, std::uint64_t seed);

struct LadderLevel {
  int n = 1;
  long branch_a = 0, branch_b = 0;  // lambda_b = a omega1 + b omega2
  C u_n;
  GModel model;  // G_n
  C eta_branch;  // quasi-period of lambda_b
};

LadderLevel ladder_level(const GModel& m, int n, long branch_a = 0, long branch_b = 0);
// phi_n(z, w) = (z, w^n exp(-eta(lambda_b) z)); [n] on the torus, identity on E.
GPoint phi_n(const GModel& base, const LadderLevel& level, const GPoint& p);
// All n preimages of p under phi_n.
std::vector<GPoint> phi_n_preimages(const GModel& base, const LadderLevel& level, const GPoint& p);
std::vector<GPoint> ladder_kernel(const LadderLevel& level);
// n lambda_{G_n}(p) - lambda_G(phi_n p)
double ladder_lambda_residual(const GModel& base, const LadderLevel& level, const GPoint& p);
// exp(n eta_hat(lambda) u_n) against exp(eta_hat(lambda) u) exp(eta(lambda_b) lambda), generators.
double ladder_cocycle_residual(const GModel& base, const LadderLevel& level);

struct TorsionClass {
  TorsionIndex index;
};
struct IdentityFiberClass {
  algnum::AlgebraicNumber alpha;
};
struct GenericClass {
  GPoint point;
};
using ExactPoint = std::variant<TorsionClass, IdentityFiberClass, GenericClass>;

// Height of a preimage under phi_n: n^-1 h_M(x) + h_{pi^* N}(x).
double point_height_ladder(const LadderLevel& level, const ExactPoint& x);

}  // namespace semiab::semi
