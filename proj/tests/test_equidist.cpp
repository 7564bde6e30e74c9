#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include "semiab/elliptic/height.hpp"
#include "semiab/equidist.hpp"
#include "semiab/error.hpp"

using namespace semiab;
using namespace semiab::equidist;
using elliptic::RationalPoint;

namespace {

RationalPoint pt(long x, long y) { return RationalPoint::affine(Rational(x), Rational(y)); }

const elliptic::CurveQ& E17() {
  static const elliptic::CurveQ E(Rational(0), Rational(17));
  return E;
}

const GModel& nonsplit() {
  static const GModel m = semi::build_extension(E17(), pt(-2, 3));
  return m;
}

const GModel& split() {
  static const GModel m = semi::build_extension(E17(), C(0.0));
  return m;
}

int mobius(int n) {
  int r = 1;
  for (int p = 2; p * p <= n; ++p)
    if (n % p == 0) {
      n /= p;
      if (n % p == 0) return 0;
      r = -r;
    }
  return n > 1 ? -r : r;
}

// Exact sum over primitive (i, j, k) in (Z/N)^3 of zeta_N^(m . x), via residue counts.
C primitive_character_sum(int N, const std::array<int, 3>& m) {
  std::vector<long> count(static_cast<std::size_t>(N), 0);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        if (std::gcd(std::gcd(std::gcd(i, j), k), N) == 1) {
          const long r = ((long(m[0]) * i + long(m[1]) * j + long(m[2]) * k) % N + N) % N;
          ++count[static_cast<std::size_t>(r)];
        }
  C s = 0;
  for (int r = 0; r < N; ++r) s += double(count[static_cast<std::size_t>(r)]) * std::polar(1.0, 2 * std::numbers::pi * r / N);
  return s;
}

OrbitSpec torsion_spec(Group g, int N, bool primitive = true) {
  OrbitSpec s;
  s.group = g;
  s.kind = primitive ? OrbitKind::PrimitiveTorsion : OrbitKind::FullTorsion;
  s.N = N;
  return s;
}

}  // namespace

TEST(Orbits, Sizes) {
  EXPECT_EQ(generate_orbit(torsion_spec(Group::Gm, 7), nonsplit()).size(), 6u);
  EXPECT_EQ(generate_orbit(torsion_spec(Group::G, 2), nonsplit()).size(), 7u);
  for (auto g : {Group::Gm, Group::E, Group::G})
    for (int N : {1, 4, 6, 9, 10})
      EXPECT_EQ(generate_orbit(torsion_spec(g, N), nonsplit()).size(), orbit_size(torsion_spec(g, N)));
  OrbitSpec tower;
  tower.group = Group::G;
  tower.kind = OrbitKind::DivisionTower;
  tower.n = 2;
  tower.depth = 3;
  const auto pts = generate_orbit(tower, nonsplit());
  ASSERT_EQ(pts.size(), 512u);
  for (const auto& p : pts)
    EXPECT_TRUE(semi::same_point(nonsplit(), semi::g_mul(nonsplit(), 8, p.point), semi::identity(nonsplit()), 1e-9));
}

TEST(Orbits, PrimitiveMeansExactOrder) {
  const auto& m = nonsplit();
  for (int N : {2, 4, 6}) {
    for (const auto& p : generate_orbit(torsion_spec(Group::G, N), m)) {
      int ord = 0;
      semi::GPoint acc = p.point;
      for (int k = 1; k <= N; ++k, acc = semi::g_add(m, acc, p.point))
        if (semi::same_point(m, acc, semi::identity(m), 1e-9)) {
          ord = k;
          break;
        }
      EXPECT_EQ(ord, N);
    }
  }
}

TEST(Orbits, SmallAndSymmetric) {
  for (int N = 1; N <= 12; ++N) {
    const auto orbit = generate_orbit(torsion_spec(Group::G, N), nonsplit());
    for (const auto& p : orbit) EXPECT_LT(p.height, 1e-9);
    // closed under negation
    for (const auto& p : orbit) {
      const auto q = semi::g_neg(nonsplit(), p.point);
      const bool found = std::any_of(orbit.begin(), orbit.end(),
                                     [&](const OrbitPoint& o) { return semi::same_point(nonsplit(), o.point, q, 1e-9); });
      EXPECT_TRUE(found);
    }
  }
}

TEST(Orbits, ErrorsAndCaps) {
  OrbitSpec s = torsion_spec(Group::G, 128);
  s.cap = 1000;
  try {
    generate_orbit(s, nonsplit());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OrbitTooLarge);
  }
  try {
    empirical_average({}, measures::character(0, 0, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyOrbit);
  }
  OrbitSpec custom;
  custom.kind = OrbitKind::CustomList;
  custom.custom = {semi::identity(nonsplit())};
  EXPECT_FALSE(strictness_certified(custom));
  EXPECT_TRUE(strictness_certified(s));
}

TEST(EmpiricalAverage, RamanujanSums) {
  const auto f = measures::character(0, 0, 1);  // f = z on the circle
  for (int N : {5, 7, 12, 30, 101}) {
    const auto orbit = generate_orbit(torsion_spec(Group::Gm, N), nonsplit());
    const C avg = empirical_average(orbit, f);
    int phi = 0;
    for (int k = 0; k < N; ++k) phi += std::gcd(k, N) == 1;
    ASSERT_EQ(orbit.size(), std::size_t(phi));
    EXPECT_NEAR(avg.real(), double(mobius(N)) / phi, 1e-13);
    EXPECT_NEAR(avg.imag(), 0.0, 1e-13);
  }
  const auto orbit = generate_orbit(torsion_spec(Group::G, 5), nonsplit());
  EXPECT_NEAR(std::abs(empirical_average(orbit, measures::character(0, 0, 0)) - 1.0), 0.0, 1e-15);
}

TEST(EmpiricalAverage, FullTorsionOrthogonality) {
  const auto orbit = generate_orbit(torsion_spec(Group::E, 9, false), nonsplit());
  for (const auto& ch : measures::character_set(3, Group::E))
    EXPECT_LT(std::abs(empirical_average(orbit, measures::character(ch[0], ch[1], ch[2]))), 1e-14);
}

TEST(RunEquidist, GmPrimeGapIsRamanujan) {
  EquidistConfig cfg;
  cfg.group = Group::Gm;
  cfg.levels = {11, 101};
  cfg.character_bound = 1;
  cfg.require_decay = true;
  const auto rep = run_equidist(cfg, nonsplit());
  for (const auto& orb : rep.orbits)
    for (const auto& g : orb.gaps)
      if (g.function_id == "character(0,0,1)") EXPECT_NEAR(g.gap, 1.0 / (orb.N_or_n - 1), 1e-14);
  EXPECT_TRUE(rep.non_increasing);
}

TEST(RunEquidist, GMatchesExactCharacterSums) {
  EquidistConfig cfg;
  cfg.levels = {8, 12, 16};
  cfg.require_decay = false;
  cfg.gap_threshold = 1.0;
  const auto rep = run_equidist(cfg, nonsplit());
  ASSERT_EQ(rep.orbits.size(), 3u);
  for (const auto& orb : rep.orbits) {
    const auto chars = measures::character_set(3);
    ASSERT_EQ(orb.gaps.size(), chars.size());
    for (std::size_t f = 0; f < chars.size(); f += 7) {
      const C exact = primitive_character_sum(orb.N_or_n, chars[f]) / double(orb.size);
      EXPECT_LT(std::abs(orb.gaps[f].empirical - exact), 1e-12) << orb.orbit_id << " " << orb.gaps[f].function_id;
      EXPECT_NEAR(orb.gaps[f].gap, std::abs(exact), 1e-12);
    }
    EXPECT_LT(orb.max_abs_lambda, 1e-9);
  }
  // N = 12 has characters with m = 0 mod its proper divisors' cofactors.
  EXPECT_GT(rep.orbits[1].max_gap, 1e-3);
  EXPECT_LT(rep.orbits[0].max_gap, 1e-12);
}

TEST(RunEquidist, ThreadCountInvariance) {
  EquidistConfig cfg;
  cfg.levels = {12, 24};
  cfg.character_bound = 2;
  cfg.threads = 1;
  const auto a = run_equidist(cfg, nonsplit());
  cfg.threads = 3;
  const auto b = run_equidist(cfg, nonsplit());
  for (std::size_t o = 0; o < a.orbits.size(); ++o)
    for (std::size_t f = 0; f < a.orbits[o].gaps.size(); ++f) {
      EXPECT_EQ(a.orbits[o].gaps[f].empirical, b.orbits[o].gaps[f].empirical);
      EXPECT_EQ(a.orbits[o].gaps[f].gap, b.orbits[o].gaps[f].gap);
    }
}

TEST(RunEquidist, SplitModelFactorises) {
  // Division tower of a non-torsion point of G = Gm x E; the orbit is a product.
  const TorusCoords x0{0.3, 0.55, std::polar(2.0, 0.4)};
  auto tower = [&](Group g) {
    OrbitSpec s;
    s.group = g;
    s.kind = OrbitKind::DivisionTower;
    s.n = 2;
    s.depth = 2;
    s.x0 = x0;
    return generate_orbit(s, split());
  };
  const auto G = tower(Group::G), Gm = tower(Group::Gm), E = tower(Group::E);
  ASSERT_EQ(G.size(), Gm.size() * E.size());
  for (int a = -4; a <= 4; ++a)
    for (int c = -4; c <= 4; c += 2) {
      const C g = empirical_average(G, measures::character(a, 1, c));
      const C prod = empirical_average(E, measures::character(a, 1, 0)) * empirical_average(Gm, measures::character(0, 0, c));
      EXPECT_LT(std::abs(g - prod), 1e-13);
    }
  // and gaps factor accordingly for functions of one factor only
  EXPECT_LT(std::abs(empirical_average(G, measures::character(0, 0, 4)) - empirical_average(Gm, measures::character(0, 0, 4))), 1e-13);
  EXPECT_GT(std::abs(empirical_average(Gm, measures::character(0, 0, 4))), 0.5);
}

TEST(LadderHeights, DivisionAndScaling) {
  const RationalPoint P = pt(-2, 3);
  for (int n : {2, 3}) {
    const RationalPoint Q = elliptic::mul(E17(), n, P);
    const RationalPoint D = find_rational_division(E17(), Q, n);
    EXPECT_EQ(elliptic::mul(E17(), n, D), Q);
    const auto tab = ladder_height_experiment(E17(), Q, {n});
    ASSERT_EQ(tab.rows.size(), 1u);
    EXPECT_LT(tab.rows[0].residual, 1e-8);
    EXPECT_NEAR(tab.rows[0].n2_h_divided, tab.rows[0].h_class, 1e-8);
  }
  const RationalPoint Q6 = elliptic::mul(E17(), 6, pt(-1, 4));
  const auto tab = ladder_height_experiment(E17(), Q6, {2, 3, 6});
  for (const auto& r : tab.rows) EXPECT_LT(r.residual, 1e-8);
  try {
    find_rational_division(E17(), P, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoRationalDivision);
  }
  const elliptic::CurveQ F(Rational(0), Rational(1));
  // E(Q) = Z/6 generated by (2, 3): (0, 1) = 2 (2, 3) and (-1, 0) = 3 (2, 3).
  for (const auto& [Q, ns] : std::vector<std::pair<RationalPoint, std::vector<int>>>{
           {pt(0, 1), {1, 2}}, {pt(-1, 0), {1, 3}}, {RationalPoint::identity(), {2, 3}}}) {
    const auto t = ladder_height_experiment(F, Q, ns);
    for (const auto& r : t.rows) {
      EXPECT_EQ(r.h_divided, 0.0);
      EXPECT_EQ(r.h_class, 0.0);
    }
  }
  try {
    find_rational_division(F, pt(2, 3), 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoRationalDivision);
  }
}

TEST(AlphaM, Differences) {
  const auto& m = nonsplit();
  const auto a = semi::make_point(m, C(0.3, 0.1), C(1.5, 0.2));
  const auto b = semi::make_point(m, C(-0.7, 0.4), C(0.2, -0.9));
  const auto c = semi::make_point(m, C(1.1, -0.3), C(3.0, 1.0));
  const std::vector<semi::GPoint> same{a, a, a};
  for (const auto& d : alpha_m(m, same)) EXPECT_TRUE(semi::same_point(m, d, semi::identity(m), 1e-12));
  const std::vector<semi::GPoint> two{a, semi::identity(m)};
  const auto r = alpha_m(m, two);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_TRUE(semi::same_point(m, r[0], a, 1e-12));
  const std::vector<semi::GPoint> three{a, b, c};
  const auto d = alpha_m(m, three);
  EXPECT_NEAR(semi::weil_lambda(m, d[0]), semi::weil_lambda(m, a) - semi::weil_lambda(m, b), 1e-10);
  EXPECT_NEAR(semi::weil_lambda(m, d[1]), semi::weil_lambda(m, b) - semi::weil_lambda(m, c), 1e-10);
  const std::vector<semi::GPoint> mixed{a, semi::identity(split())};
  try {
    alpha_m(m, mixed);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ModelMismatch);
  }
}
