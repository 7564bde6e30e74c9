#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "semiab/dynamic_metric.hpp"

using namespace semiab;
using namespace semiab::dynamics;

namespace {

using C = std::complex<double>;

DynamicalHeightProblem<C> squaring_problem() {
  DynamicalHeightProblem<C> p;
  p.degree = 2;
  p.dynamics = [](const C& z) { return z * z; };
  p.naive_height = [](const C& z) { return std::log(std::max(1.0, std::abs(z))); };
  return p;
}

// z -> z^d in log-modulus coordinates with the smooth naive height
// log(1 + |z|^2)/2; the Tate limit is log max(1, |z|).
DynamicalHeightProblem<double> smooth_power_problem(int d, double shift = 0.0) {
  DynamicalHeightProblem<double> p;
  p.degree = d;
  p.tolerance = 1e-14;
  p.max_iterations = 100;
  p.cocycle_shift = shift;
  p.dynamics = [d](const double& r) { return d * r; };
  p.naive_height = [](const double& r) {
    return r > 0 ? r + 0.5 * std::log1p(std::exp(-2 * r)) : 0.5 * std::log1p(std::exp(2 * r));
  };
  return p;
}

const double kTwoPi = 2 * std::numbers::pi;

// Polar chart (r, theta) on the closed unit disk.
Axis radius_axis(int n) { return {0.0, 1.0, n, false}; }
Axis angle_axis(int n) { return {0.0, kTwoPi, n, true}; }

ChartPoint square_polar(const ChartPoint& p) { return {p.a * p.a, 2 * p.b}; }

}  // namespace

TEST(TateLimit, NaiveHeightAlreadyCanonical) {
  auto r = tate_limit(squaring_problem(), C(2.0, 0.0));
  EXPECT_NEAR(r.value, std::log(2.0), 1e-15);
  EXPECT_EQ(r.iterations, 2);
}

TEST(TateLimit, RootOfUnity) {
  auto r = tate_limit(squaring_problem(), std::polar(1.0, kTwoPi / 7));
  EXPECT_NEAR(r.value, 0.0, 1e-15);
}

TEST(TateLimit, SmoothNaiveHeightConverges) {
  for (double r0 : {-1.0, 0.0, 0.3, 1.7}) {
    auto r = tate_limit(smooth_power_problem(2), r0);
    EXPECT_NEAR(r.value, std::max(0.0, r0), 1e-13) << r0;
    EXPECT_LE(std::fabs(r.value - std::max(0.0, r0)), r.error_bound + 1e-13);
  }
}

TEST(TateLimit, CocycleShiftMovesLimitByShiftOverDegreeMinusOne) {
  for (int d : {2, 3, 5})
    for (double c : {-0.7, 0.25, 2.0}) {
      const double base = tate_limit(smooth_power_problem(d), 0.4).value;
      const double shifted = tate_limit(smooth_power_problem(d, c), 0.4).value;
      EXPECT_NEAR(shifted - base, c / (d - 1), 1e-10) << d << " " << c;
    }
}

TEST(TateLimit, EquivariantUnderIteration) {
  for (int d : {2, 3}) {
    const auto prob = smooth_power_problem(d);
    const double x = 0.35;
    const double h = tate_limit(prob, x).value;
    double y = x;
    for (int m = 1; m <= 3; ++m) {
      y = prob.dynamics(y);
      EXPECT_NEAR(tate_limit(prob, y).value, std::pow(d, m) * h, 1e-8);
    }
  }
}

TEST(TateLimit, Errors) {
  auto p = squaring_problem();
  p.naive_height = [](const C& z) { return 0.5 * std::log(1 + std::norm(z)); };
  p.tolerance = 0.0;
  try {
    tate_limit(p, C(3.0, 0.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OverflowAtIterate);
  }
  auto q = smooth_power_problem(2);
  q.max_iterations = 2;
  try {
    tate_limit(q, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoConvergence);
  }
  q.degree = 1;
  EXPECT_THROW(tate_limit(q, 0.5), Error);
}

TEST(PotentialGrid, ZeroIsFixed) {
  auto g0 = PotentialGrid::sample(radius_axis(17), angle_axis(16), [](const ChartPoint&) { return 0.0; });
  auto g = canonical_potential_iterate(g0, square_polar, 2, 10);
  EXPECT_EQ(g.sup_norm(), 0.0);
}

TEST(PotentialGrid, NodesAndInterpolation) {
  auto g = PotentialGrid::sample(radius_axis(9), angle_axis(8), [](const ChartPoint& p) { return p.a + std::cos(p.b); });
  EXPECT_EQ(g.nodes_a().front(), 0.0);
  EXPECT_EQ(g.nodes_a().back(), 1.0);
  EXPECT_NEAR(g.interpolate({1.0, kTwoPi}), 2.0, 1e-12);
  EXPECT_NEAR(g.interpolate({0.5, 0.0}), 1.5, 1e-12);
  try {
    g.interpolate({1.5, 0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DomainEscape);
  }
}

TEST(PotentialGrid, ExteriorChartConvergesToLogModulus) {
  // On |z| >= 1 with w = 1/z the smooth start log(1 + |z|^2)/2 splits as
  // -log|w| + log(1 + |w|^2)/2; the singular part is already canonical, so
  // the grid carries the regular part, whose limit is 0.
  const auto regular0 = [](const ChartPoint& p) { return 0.5 * std::log1p(p.a * p.a); };
  auto g0 = PotentialGrid::sample(radius_axis(129), angle_axis(8), regular0);
  const double e0 = g0.sup_norm();
  double interp_error = 0.0;
  {
    auto once = canonical_potential_iterate(g0, square_polar, 2, 1);
    interp_error = once.sup_distance([&](const ChartPoint& p) { return regular0(square_polar(p)) / 2; });
  }
  for (int k = 1; k <= 12; ++k) {
    auto g = canonical_potential_iterate(g0, square_polar, 2, k);
    // full potential minus |log|z|| equals the regular part
    EXPECT_LE(g.sup_norm(), std::ldexp(e0, -k) + 2 * interp_error + 1e-15) << k;
  }
  EXPECT_LT(interp_error, 1e-4);
}

TEST(PotentialGrid, UnitDiskConvergesToZero) {
  auto g0 = PotentialGrid::sample(radius_axis(65), angle_axis(5),
                                  [](const ChartPoint& p) { return 0.5 * std::log1p(p.a * p.a); });
  auto g = canonical_potential_iterate(g0, square_polar, 2, 30);
  EXPECT_LT(g.sup_norm(), 1e-8);
}

TEST(PotentialGrid, AnnulusChartIsNotInvariant) {
  // log-radius chart on an annulus: rho -> 2 rho leaves the chart.
  auto g0 = PotentialGrid::sample({-1.0, 1.0, 9, false}, angle_axis(4), [](const ChartPoint&) { return 0.0; });
  try {
    canonical_potential_iterate(g0, [](const ChartPoint& p) { return ChartPoint{2 * p.a, 2 * p.b}; }, 2, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DomainEscape);
  }
}

TEST(PotentialGrid, ExactContractionOnCircle) {
  // Angle-only chart on |z| = 1 with an odd node count: doubling permutes
  // the nodes, so each step halves the successive difference exactly.
  const Axis r{1.0, 1.0, 1, false};
  auto g0 = PotentialGrid::sample(r, angle_axis(33), [](const ChartPoint& p) {
    return std::sin(3 * p.b) + 0.25 * std::cos(p.b) + (p.b > 2.0 && p.b < 3.0 ? 1.0 : 0.0);
  });
  auto hist = contraction_history(g0, square_polar, 2, 20);
  ASSERT_EQ(hist.measured_ratios.size(), 19u);
  for (double ratio : hist.measured_ratios) EXPECT_NEAR(ratio, 0.5, 1e-12);
}

TEST(IsometryResidual, Examples) {
  auto one = PotentialGrid::sample(radius_axis(9), angle_axis(7), [](const ChartPoint&) { return 1.0; });
  EXPECT_NEAR(isometry_residual(one, square_polar, 2), 1.0, 1e-15);

  // |log|z|| in the exterior chart: regular part 0, residual 0.
  auto canonical = PotentialGrid::sample(radius_axis(9), angle_axis(7), [](const ChartPoint&) { return 0.0; });
  EXPECT_EQ(isometry_residual(canonical, square_polar, 2), 0.0);
}

TEST(IsometryResidual, BoundAfterIterations) {
  auto g0 = PotentialGrid::sample(radius_axis(33), angle_axis(9), [](const ChartPoint& p) {
    return std::cos(p.b) * p.a + 0.3;
  });
  const double s0 = g0.sup_norm();
  for (int k = 1; k <= 8; ++k) {
    auto g = canonical_potential_iterate(g0, square_polar, 2, k);
    EXPECT_LE(isometry_residual(g, square_polar, 2), s0 * std::ldexp(1.0, 1 - k) + 1e-12) << k;
  }
}
