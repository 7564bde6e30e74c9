#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "semiab/algnum.hpp"
#include "semiab/dynamic_metric.hpp"

using namespace semiab;
using namespace semiab::algnum;

namespace {

IntPoly poly(std::initializer_list<long> c) {
  std::vector<Integer> v;
  for (long x : c) v.emplace_back(x);
  return IntPoly(v);
}

// Real root of x^2 - x - 1 in [a, b] by bisection.
Real bisect_golden(Real a, Real b, int bits) {
  PrecisionGuard guard(bits + 16);
  a.precision(Real::default_precision());
  b.precision(Real::default_precision());
  auto f = [](const Real& x) { return x * x - x - 1; };
  for (int i = 0; i < bits + 8; ++i) {
    Real m = (a + b) / 2;
    if ((f(a) < 0) == (f(m) < 0))
      a = m;
    else
      b = m;
  }
  return (a + b) / 2;
}

// Tate limit on the squaring map acting on every conjugate at once, carried
// in log-modulus coordinates so the orbit never overflows. The naive height
// log(1 + |z|^2)/2 is smooth, so the limit is a genuine dynamical average.
double squaring_tate_limit(const std::vector<double>& log_moduli) {
  dynamics::DynamicalHeightProblem<std::vector<double>> problem;
  problem.degree = 2;
  problem.max_iterations = 80;
  problem.tolerance = 1e-15;
  problem.dynamics = [](const std::vector<double>& r) {
    std::vector<double> out(r);
    for (double& x : out) x *= 2;
    return out;
  };
  problem.naive_height = [](const std::vector<double>& r) {
    double s = 0;
    for (double x : r) s += (x > 0 ? x + 0.5 * std::log1p(std::exp(-2 * x)) : 0.5 * std::log1p(std::exp(2 * x)));
    return s / static_cast<double>(r.size());
  };
  return dynamics::tate_limit(problem, log_moduli).value;
}

int brute_phi(int n) {
  int c = 0;
  for (int k = 0; k < n; ++k)
    if (std::gcd(k, n) == 1) ++c;
  return c;
}

// Eisenstein at p = 2 or 3 guarantees irreducibility.
IntPoly random_eisenstein(std::mt19937_64& rng, int degree) {
  std::uniform_int_distribution<int> prime_pick(0, 1), small(-3, 3), unit(1, 2);
  const int p = prime_pick(rng) ? 2 : 3;
  std::vector<Integer> c(static_cast<std::size_t>(degree + 1));
  int lead;
  do lead = small(rng);
  while (lead == 0 || lead % p == 0);
  c[0] = lead;
  for (int i = 1; i < degree; ++i) c[static_cast<std::size_t>(i)] = p * small(rng);
  int k = unit(rng);
  if (k % p == 0) k = 1;
  c[static_cast<std::size_t>(degree)] = p * (std::uniform_int_distribution<int>(0, 1)(rng) ? k : -k);
  return IntPoly(c);
}

}  // namespace

TEST(IntPoly, NormalisesAndParses) {
  EXPECT_EQ(IntPoly::parse("x^2 - x - 1"), poly({1, -1, -1}));
  EXPECT_EQ(IntPoly::parse("-4x+6"), poly({2, -3}));
  EXPECT_EQ(IntPoly::parse("3*x^4+x+1"), poly({3, 0, 0, 1, 1}));
  EXPECT_EQ(poly({-2, 4}).to_string().empty(), false);
  EXPECT_THROW(IntPoly::parse("x^2 +"), Error);
  EXPECT_THROW(IntPoly::parse("7"), Error);
}

TEST(ComplexRoots, ForcedRootsOfXSquaredPlusOne) {
  auto r = complex_roots(poly({1, 0, 1}), 128);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_LT(to_double(abs(r[0] - Complex(0, 1))), 1e-30);
  EXPECT_LT(to_double(abs(r[1] - Complex(0, -1))), 1e-30);
}

TEST(ComplexRoots, GoldenRatioMatchesBisection) {
  auto r = complex_roots(poly({1, -1, -1}), 128);
  ASSERT_EQ(r.size(), 2u);
  const Real hi = bisect_golden(Real(1), Real(2), 128);
  const Real lo = bisect_golden(Real(-1), Real(0), 128);
  PrecisionGuard guard(140);
  const Real eps = ldexp(Real(1), -127);
  EXPECT_LT(abs(r[0].real() - lo), eps);
  EXPECT_LT(abs(r[1].real() - hi), eps);
  EXPECT_LT(abs(r[0].imag()), eps);
}

TEST(ComplexRoots, LinearRationalRoot) {
  auto r = complex_roots(poly({2, -3}));
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(to_double(r[0].real()), 1.5);
}

TEST(ComplexRoots, RejectsNonSquarefree) {
  try {
    complex_roots(poly({1, -2, 1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonSquarefree);
  }
}

TEST(ComplexRoots, DeterministicOrderAndCount) {
  auto p = poly({1, 0, 0, 0, 0, -1, -1});
  auto a = complex_roots(p, 200), b = complex_roots(p, 200);
  ASSERT_EQ(a.size(), 6u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
  for (std::size_t i = 1; i < a.size(); ++i) EXPECT_LE(to_double(a[i - 1].real()), to_double(a[i].real()) + 1e-30);
  for (const auto& z : a) EXPECT_LT(std::abs(to_double(p.evaluate(z))), 1e-50);
}

TEST(WeilHeight, RationalsExhaustive) {
  PrecisionGuard guard(140);
  const Real tol = ldexp(Real(1), -118);
  for (int p = -50; p <= 50; ++p)
    for (int q = 1; q <= 50; ++q) {
      if (std::gcd(p, q) != 1) continue;
      const Real h = weil_height_mp(AlgebraicNumber::rational(p, q));
      const Real expected = log(Real(std::max(std::abs(p), q)));
      ASSERT_LT(abs(h - expected), tol) << p << "/" << q;
    }
}

TEST(WeilHeight, Examples) {
  EXPECT_EQ(weil_height(AlgebraicNumber::rational(1, 1)), 0.0);
  EXPECT_NEAR(weil_height(AlgebraicNumber::rational(2, 1)), std::log(2.0), 1e-15);
  const AlgebraicNumber phi(poly({1, -1, -1}), 1);
  EXPECT_NEAR(weil_height(phi), 0.5 * std::log((1 + std::sqrt(5.0)) / 2), 1e-15);
}

TEST(WeilHeight, GoldenRatioAgreesWithSquaringTateLimit) {
  const AlgebraicNumber phi(poly({1, -1, -1}), 1);
  std::vector<double> r;
  for (const auto& z : phi.conjugates()) r.push_back(std::log(std::abs(to_double(z))));
  EXPECT_NEAR(weil_height(phi), squaring_tate_limit(r), 1e-13);
  EXPECT_NEAR(toric_canonical_height(phi), 2 * squaring_tate_limit(r), 2e-13);
}

TEST(WeilHeight, GaloisInvariantExactly) {
  for (const auto& p : {poly({1, 0, 0, -2}), poly({2, 1, 3, -1}), poly({1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1})}) {
    const Real h0 = weil_height_mp(AlgebraicNumber(p, 0));
    for (int k = 1; k < p.degree(); ++k) EXPECT_EQ(weil_height_mp(AlgebraicNumber(p, k)), h0);
  }
}

TEST(WeilHeight, InverseInvariant) {
  const auto p = poly({3, 1, -2, 5});
  const AlgebraicNumber a(p, 0);
  EXPECT_NEAR(weil_height(a), weil_height(a.inverse()), 1e-14);
}

TEST(WeilHeight, PowerScalingOnRandomNumbers) {
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> deg(1, 4);
  for (int trial = 0; trial < 100; ++trial) {
    const IntPoly p = random_eisenstein(rng, deg(rng));
    const Real h = weil_height_mp(AlgebraicNumber(p, 0, 128));
    for (int n = 1; n <= 8; ++n) {
      const IntPoly pn = power_minimal_polynomial(p, n);
      const Real hn = weil_height_mp(AlgebraicNumber(pn, 0, 128));
      ASSERT_LT(to_double(abs(hn - n * h)), 1e-10) << p.to_string() << " n=" << n;
    }
  }
}

TEST(ToricHeight, Examples) {
  EXPECT_NEAR(toric_canonical_height(AlgebraicNumber::rational(2, 1)), 2 * std::log(2.0), 1e-12);
  EXPECT_LT(toric_canonical_height(AlgebraicNumber(cyclotomic_polynomial(12), 2)), 1e-10);
  const AlgebraicNumber phi(poly({1, -1, -1}), 1);
  EXPECT_NEAR(toric_canonical_height(phi), std::log((1 + std::sqrt(5.0)) / 2), 1e-14);
  EXPECT_NEAR(toric_canonical_height(phi), 2 * weil_height(phi), 1e-14);
}

TEST(ToricHeight, ZeroInput) {
  try {
    toric_canonical_height(AlgebraicNumber::rational(0, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroInput);
  }
}

TEST(ToricHeight, KroneckerCorpus) {
  for (int n = 1; n <= 60; ++n) {
    const IntPoly c = cyclotomic_polynomial(n);
    if (c.degree() > 12) continue;
    ASSERT_EQ(c.degree(), brute_phi(n));
    for (int k = 0; k < c.degree(); ++k)
      EXPECT_LT(toric_canonical_height(AlgebraicNumber(c, k)), 1e-10) << "Phi_" << n;
  }
  const std::vector<IntPoly> others = {
      poly({1, -1, -1}),
      poly({1, 0, 0, -2}),
      poly({2, -2, 1}),
      poly({1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1}),  // Lehmer
      poly({1, 0, -1, -1}),                           // smallest Pisot number
      poly({1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, -3}),
      poly({5, 6, 5}),
  };
  for (const auto& p : others) EXPECT_GT(toric_canonical_height(AlgebraicNumber(p, 0)), 1e-10) << p.to_string();
}

TEST(RootsOfUnity, Counts) {
  auto one = primitive_roots_of_unity(1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_NEAR(std::abs(one[0] - 1.0), 0.0, 1e-15);
  auto four = primitive_roots_of_unity(4);
  ASSERT_EQ(four.size(), 2u);
  EXPECT_NEAR(std::abs(four[0] - std::complex<double>(0, 1)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(four[1] - std::complex<double>(0, -1)), 0.0, 1e-15);
  EXPECT_EQ(primitive_roots_of_unity(12).size(), static_cast<std::size_t>(brute_phi(12)));
  for (int n = 1; n < 100; ++n) EXPECT_EQ(euler_phi(n), brute_phi(n));
}

TEST(PowerMinimalPolynomial, Examples) {
  EXPECT_EQ(power_minimal_polynomial(poly({1, -1, -1}), 3), poly({1, -4, -1}));
  EXPECT_EQ(power_minimal_polynomial(poly({1, 0, -2}), 2), poly({1, -2}));
  EXPECT_EQ(power_minimal_polynomial(cyclotomic_polynomial(12), 3), cyclotomic_polynomial(4));
}

TEST(AlgebraicNumber, ConjugateSharesRoots) {
  const IntPoly p = IntPoly::parse("x^3 - x - 1");
  const AlgebraicNumber a(p, 0);
  for (int k = 0; k < 3; ++k) {
    const AlgebraicNumber b = a.conjugate(k), c(p, k);
    EXPECT_EQ(b.value(), c.value());
    EXPECT_EQ(&b.conjugates(), &a.conjugates());
    EXPECT_NEAR(toric_canonical_height(b), toric_canonical_height(c), 1e-15);
  }
  EXPECT_THROW(a.conjugate(3), Error);
  EXPECT_NEAR(toric_canonical_height(AlgebraicNumber(IntPoly::parse("3x^2 - 2"), 1)),
              weil_height(AlgebraicNumber(IntPoly::parse("3x^2 - 2"), 1)) +
                  weil_height(AlgebraicNumber(IntPoly::parse("2x^2 - 3"), 0)),
              1e-15);
}
