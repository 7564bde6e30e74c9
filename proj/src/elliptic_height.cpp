#include "semiab/elliptic/height.hpp"

#include <array>

#include "semiab/error.hpp"

namespace semiab::elliptic {

namespace {

Integer bareiss_determinant(std::vector<std::vector<Integer>> m) {
  const std::size_t n = m.size();
  Integer prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t r = k + 1;
      while (r < n && m[r][k] == 0) ++r;
      if (r == n) return 0;
      std::swap(m[k], m[r]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

using Quartic = std::array<Integer, 5>;  // coefficients of A^4, A^3B, ..., B^4

Integer eval_form(const Quartic& f, const Integer& A, const Integer& B) {
  Integer acc = 0;
  Integer bpow = 1;
  std::array<Integer, 5> apow;
  apow[0] = 1;
  for (int i = 1; i < 5; ++i) apow[static_cast<std::size_t>(i)] = apow[static_cast<std::size_t>(i - 1)] * A;
  for (int i = 0; i < 5; ++i) {
    acc += f[static_cast<std::size_t>(i)] * apow[static_cast<std::size_t>(4 - i)] * bpow;
    bpow *= B;
  }
  return acc;
}

Integer mod_positive(const Integer& x, const Integer& m) {
  Integer r = x % m;
  if (r < 0) r += m;
  return r;
}

Integer gcd3(const Integer& a, const Integer& b, const Integer& c) {
  return mp::gcd(mp::gcd(a, b), c);
}

}  // namespace

double naive_height(const RationalPoint& P) {
  if (P.infinity) return 0.0;
  const Integer p = abs(mp::numerator(P.x));
  const Integer q = mp::denominator(P.x);
  return 0.5 * log_abs(p > q ? p : q);
}

Integer doubling_resultant(const Integer& a, const Integer& b) {
  const Quartic f{1, 0, -2 * a, -8 * b, a * a};
  const Quartic g{0, 4, 0, 4 * a, 4 * b};
  std::vector<std::vector<Integer>> s(8, std::vector<Integer>(8, Integer(0)));
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 5; ++c) {
      s[r][r + c] = f[c];
      s[r + 4][r + c] = g[c];
    }
  return abs(bareiss_determinant(std::move(s)));
}

Real neron_tate_mp(const CurveQ& E, const RationalPoint& P, int precision_bits) {
  require_on_curve(E, P);
  if (precision_bits < 16) throw Error(ErrorKind::InvalidArgument, "precision_bits too small");
  if (P.infinity || torsion_order(E, P) != 0) {
    PrecisionGuard guard(precision_bits);
    return Real(0);
  }
  const IntegralModel model = integral_model(E);
  const RationalPoint Q = model.map(P);
  const Integer& a = model.A;
  const Integer& b = model.B;
  const Integer R = doubling_resultant(a, b);

  // Each step's contribution is bounded by C = log R + arch bound.
  const double log_coeffs = std::log1p(8.0 * (std::fabs(a.convert_to<double>()) + std::fabs(b.convert_to<double>())) +
                                       a.convert_to<double>() * a.convert_to<double>());
  const double C = log_abs(R) + log_coeffs + 2.0;
  const int K = static_cast<int>(std::ceil((precision_bits + 4 + std::log2(C)) / 2.0)) + 2;

  PrecisionGuard guard(precision_bits + 2 * K + 64);

  const Quartic F{1, 0, -2 * a, -8 * b, a * a};
  const Quartic G{0, 4, 0, 4 * a, 4 * b};

  const Integer A0 = mp::numerator(Q.x), B0 = mp::denominator(Q.x);
  Integer M = mp::pow(R, static_cast<unsigned>(K + 1));
  Integer Am = mod_positive(A0, M), Bm = mod_positive(B0, M);

  const Real ra(a), rb(b);
  Real x = Real(A0) / Real(B0);
  Real total = log_abs_real(abs(A0) > B0 ? Integer(abs(A0)) : B0);
  Real weight = Real(1) / 4;
  for (int k = 0; k < K; ++k) {
    const Real x2 = x * x;
    const Real phi = x2 * x2 - 2 * ra * x2 - 8 * rb * x + ra * ra;
    const Real psi = 4 * (x2 * x + ra * x + rb);
    const Real big = abs(phi) > abs(psi) ? Real(abs(phi)) : Real(abs(psi));
    const Real xmax = abs(x) > 1 ? Real(abs(x)) : Real(1);

    const Integer N = mod_positive(eval_form(F, Am, Bm), M);
    const Integer D = mod_positive(eval_form(G, Am, Bm), M);
    const Integer g = gcd3(N % R, D % R, R);

    total += weight * (log(big) - 4 * log(xmax) - log_abs_real(g));
    M /= g;
    Am = mod_positive(N / g, M);
    Bm = mod_positive(D / g, M);
    x = phi / psi;
    weight /= 4;
  }
  Real h = total / 2;
  h.precision(bits_to_digits10(precision_bits));
  return h;
}

double neron_tate(const CurveQ& E, const RationalPoint& P, int precision_bits) {
  return to_double(neron_tate_mp(E, P, precision_bits));
}

dynamics::DynamicalHeightProblem<RationalPoint> doubling_problem(const CurveQ& E, const ExactTateOptions& opts) {
  dynamics::DynamicalHeightProblem<RationalPoint> problem;
  problem.degree = 4;
  problem.max_iterations = opts.max_iterations;
  problem.tolerance = opts.tolerance;
  const std::size_t cap = opts.max_coordinate_bits;
  problem.naive_height = [](const RationalPoint& P) { return naive_height(P); };
  problem.dynamics = [E, cap](const RationalPoint& P) {
    if (!P.infinity && (bit_length(mp::numerator(P.x)) > cap || bit_length(mp::denominator(P.x)) > cap))
      throw Error(ErrorKind::CoordinateOverflow, "exact doubling exceeds " + std::to_string(cap) + " bits");
    return double_point(E, P);
  };
  return problem;
}

dynamics::TateLimitResult exact_tate_limit(const CurveQ& E, const RationalPoint& P, const ExactTateOptions& opts) {
  require_on_curve(E, P);
  return dynamics::tate_limit(doubling_problem(E, opts), P);
}

}  // namespace semiab::elliptic
