#include "semiab/algnum.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <sstream>

#include "semiab/error.hpp"

namespace semiab::algnum {

namespace {

using Coeffs = std::vector<Integer>;

void strip_leading_zeros(Coeffs& p) {
  auto it = std::find_if(p.begin(), p.end(), [](const Integer& c) { return c != 0; });
  p.erase(p.begin(), it);
}

Integer content(const Coeffs& p) {
  Integer g = 0;
  for (const auto& c : p) g = gcd(g, c);
  return g;
}

Coeffs make_primitive(Coeffs p) {
  strip_leading_zeros(p);
  if (p.empty()) return p;
  Integer g = content(p);
  if (p.front() < 0) g = -g;
  for (auto& c : p) c /= g;
  return p;
}

int deg(const Coeffs& p) { return static_cast<int>(p.size()) - 1; }

// Pseudo-remainder of a by b (b nonzero), made primitive.
Coeffs primitive_prem(Coeffs a, const Coeffs& b) {
  const Integer& lb = b.front();
  while (!a.empty() && deg(a) >= deg(b)) {
    const Integer la = a.front();
    for (auto& c : a) c *= lb;
    for (std::size_t i = 0; i < b.size(); ++i) a[i] -= la * b[i];
    a.erase(a.begin());
    strip_leading_zeros(a);
  }
  return make_primitive(std::move(a));
}

Complex horner(const Coeffs& p, const Complex& z) {
  Complex acc(Real(p.front()), Real(0));
  for (std::size_t i = 1; i < p.size(); ++i) acc = acc * z + Complex(Real(p[i]), Real(0));
  return acc;
}

Integer round_to_grid(const Real& x, int grid_bits) {
  Real scaled = ldexp(x, grid_bits);
  scaled = floor(scaled + Real(0.5));
  Integer out;
  mpfr_get_z(out.backend().data(), scaled.backend().data(), MPFR_RNDN);
  return out;
}

// Aberth-Ehrlich iteration at the current default precision.
void aberth_iterate(const Coeffs& p, const Coeffs& dp, std::vector<Complex>& z, int work_bits,
                    int max_iterations) {
  const std::size_t d = z.size();
  const Real stop = ldexp(Real(1), -(work_bits - 8));
  for (int iter = 0; iter < max_iterations; ++iter) {
    Real max_step = 0;
    for (std::size_t i = 0; i < d; ++i) {
      Complex pv = horner(p, z[i]);
      if (pv == Complex(0)) continue;
      Complex ratio = pv / horner(dp, z[i]);
      Complex repulsion(0);
      for (std::size_t j = 0; j < d; ++j)
        if (j != i) repulsion += Complex(Real(1)) / (z[i] - z[j]);
      Complex step = ratio / (Complex(Real(1)) - ratio * repulsion);
      z[i] -= step;
      Real scale = std::max(Real(1), Real(abs(z[i])));
      max_step = std::max(max_step, Real(abs(step) / scale));
    }
    if (max_step < stop) return;
  }
}

bool certify(const Coeffs& p, const Coeffs& dp, const std::vector<Complex>& z, int precision_bits) {
  const std::size_t d = z.size();
  const Real target = ldexp(Real(1), -precision_bits);
  std::vector<Real> radius(d);
  for (std::size_t i = 0; i < d; ++i) {
    Complex der = horner(dp, z[i]);
    if (der == Complex(0)) return false;
    radius[i] = Real(static_cast<long>(d)) * abs(horner(p, z[i]) / der);
    if (!(radius[i] < target)) return false;
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j)
      if (!(abs(z[i] - z[j]) > radius[i] + radius[j])) return false;
  return true;
}

}  // namespace

IntPoly::IntPoly(std::vector<Integer> coefficients) : coefficients_(make_primitive(std::move(coefficients))) {
  if (coefficients_.size() < 2) throw Error(ErrorKind::InvalidArgument, "polynomial must have degree >= 1");
}

IntPoly IntPoly::reversed() const {
  Coeffs r(coefficients_.rbegin(), coefficients_.rend());
  return IntPoly(std::move(r));
}

bool IntPoly::is_squarefree() const {
  return deg(poly_gcd(coefficients_, poly_derivative(coefficients_))) == 0;
}

Complex IntPoly::evaluate(const Complex& x) const { return horner(coefficients_, x); }

Integer IntPoly::evaluate(const Integer& x) const {
  Integer acc = coefficients_.front();
  for (std::size_t i = 1; i < coefficients_.size(); ++i) acc = acc * x + coefficients_[i];
  return acc;
}

std::string IntPoly::to_string() const {
  std::ostringstream out;
  const int d = degree();
  bool first = true;
  for (int i = 0; i <= d; ++i) {
    const Integer& c = coefficients_[static_cast<std::size_t>(i)];
    if (c == 0) continue;
    const int power = d - i;
    Integer mag = abs(c);
    if (first) {
      if (c < 0) out << "-";
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    if (mag != 1 || power == 0) out << mag;
    if (power > 0) {
      if (mag != 1) out << "*";
      out << "x";
      if (power > 1) out << "^" << power;
    }
    first = false;
  }
  return out.str();
}

IntPoly IntPoly::parse(std::string_view text) {
  std::map<int, Integer> terms;
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto fail = [&](const std::string& why) -> IntPoly {
    throw Error(ErrorKind::Parse, "polynomial '" + std::string(text) + "': " + why);
  };
  auto read_digits = [&]() -> std::string {
    std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    return std::string(text.substr(start, pos - start));
  };
  skip_ws();
  if (pos == text.size()) return fail("empty input");
  bool first = true;
  while (true) {
    skip_ws();
    if (pos == text.size()) break;
    int sign = 1;
    if (text[pos] == '+' || text[pos] == '-') {
      sign = text[pos] == '-' ? -1 : 1;
      ++pos;
      skip_ws();
    } else if (!first) {
      return fail("expected '+' or '-' at position " + std::to_string(pos));
    }
    first = false;
    Integer coeff = 1;
    bool have_coeff = false;
    std::string digits = read_digits();
    if (!digits.empty()) {
      coeff = Integer(digits);
      have_coeff = true;
      skip_ws();
      if (pos < text.size() && text[pos] == '*') {
        ++pos;
        skip_ws();
        if (pos == text.size() || text[pos] != 'x') return fail("expected 'x' after '*'");
      }
    }
    int power = 0;
    if (pos < text.size() && text[pos] == 'x') {
      ++pos;
      power = 1;
      skip_ws();
      if (pos < text.size() && text[pos] == '^') {
        ++pos;
        skip_ws();
        std::string exp_digits = read_digits();
        if (exp_digits.empty()) return fail("missing exponent");
        power = std::stoi(exp_digits);
      }
    } else if (!have_coeff) {
      return fail("expected a term at position " + std::to_string(pos));
    }
    terms[power] += sign * coeff;
  }
  if (terms.empty()) return fail("no terms");
  const int d = terms.rbegin()->first;
  Coeffs coeffs(static_cast<std::size_t>(d) + 1, Integer(0));
  for (const auto& [power, c] : terms) coeffs[static_cast<std::size_t>(d - power)] = c;
  return IntPoly(std::move(coeffs));
}

std::vector<Integer> poly_derivative(const std::vector<Integer>& p) {
  const int d = deg(p);
  Coeffs out;
  for (int i = 0; i < d; ++i) out.push_back(p[static_cast<std::size_t>(i)] * (d - i));
  if (out.empty()) out.push_back(0);
  return out;
}

std::vector<Integer> poly_gcd(const std::vector<Integer>& a, const std::vector<Integer>& b) {
  Coeffs x = make_primitive(a), y = make_primitive(b);
  if (x.empty()) return y;
  if (y.empty()) return x;
  if (deg(x) < deg(y)) std::swap(x, y);
  while (!y.empty()) {
    Coeffs r = primitive_prem(x, y);
    x = std::move(y);
    y = std::move(r);
  }
  return x;
}

std::vector<Integer> poly_exact_div(const std::vector<Integer>& a, const std::vector<Integer>& b) {
  Coeffs rem = a;
  strip_leading_zeros(rem);
  if (deg(rem) < deg(b)) return {Integer(0)};
  Coeffs quot(static_cast<std::size_t>(deg(rem) - deg(b) + 1), Integer(0));
  for (std::size_t q = 0; q < quot.size(); ++q) {
    if (rem[q] % b.front() != 0) throw Error(ErrorKind::InvalidArgument, "inexact polynomial division");
    quot[q] = rem[q] / b.front();
    for (std::size_t i = 0; i < b.size(); ++i) rem[q + i] -= quot[q] * b[i];
  }
  for (const auto& c : rem)
    if (c != 0) throw Error(ErrorKind::InvalidArgument, "inexact polynomial division");
  return quot;
}

std::vector<Complex> complex_roots(const IntPoly& p, int precision_bits) {
  if (precision_bits < 16) throw Error(ErrorKind::InvalidArgument, "precision_bits must be >= 16");
  if (!p.is_squarefree())
    throw Error(ErrorKind::NonSquarefree, "gcd(p, p') is nonconstant for " + p.to_string());
  const Coeffs& c = p.coefficients();
  const Coeffs dc = poly_derivative(c);
  const std::size_t d = static_cast<std::size_t>(p.degree());

  std::vector<Complex> z;
  bool certified = false;
  for (int attempt = 0; attempt < 4 && !certified; ++attempt) {
    const int work_bits = precision_bits + 64 + 64 * attempt;
    PrecisionGuard guard(work_bits);
    if (z.empty()) {
      // Fujiwara bound on the root moduli.
      Real bound = 0;
      const Real lead = abs(Real(c.front()));
      for (std::size_t k = 1; k <= d; ++k) {
        Real ratio = abs(Real(c[k])) / lead;
        if (k == d) ratio /= 2;
        if (ratio > 0) bound = std::max(bound, Real(pow(ratio, Real(1) / Real(static_cast<long>(k)))));
      }
      const Real radius = bound > 0 ? bound : Real(1);
      const Real two_pi = 2 * pi<Real>();
      for (std::size_t k = 0; k < d; ++k) {
        Real angle = two_pi * Real(static_cast<long>(k)) / Real(static_cast<long>(d)) + Real(0.4);
        z.emplace_back(radius * cos(angle), radius * sin(angle));
      }
    } else {
      const unsigned digits = Real::default_precision();
      for (auto& r : z) {
        Real re = r.real(), im = r.imag();
        re.precision(digits);
        im.precision(digits);
        r = Complex(re, im);
      }
    }
    aberth_iterate(c, dc, z, work_bits, 400 + 200 * attempt);
    certified = certify(c, dc, z, precision_bits);
  }
  if (!certified)
    throw Error(ErrorKind::PrecisionUnreachable,
                "could not certify roots of " + p.to_string() + " to " + std::to_string(precision_bits) + " bits");

  PrecisionGuard guard(precision_bits + 64);
  const int grid = std::max(8, precision_bits - 8);
  std::vector<std::pair<std::pair<Integer, Integer>, std::size_t>> keys;
  for (std::size_t i = 0; i < z.size(); ++i)
    keys.push_back({{round_to_grid(z[i].real(), grid), round_to_grid(z[i].imag(), grid)}, i});
  std::sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) {
    if (a.first.first != b.first.first) return a.first.first < b.first.first;
    return a.first.second > b.first.second;
  });
  std::vector<Complex> out;
  out.reserve(z.size());
  for (const auto& k : keys) out.push_back(z[k.second]);
  return out;
}

AlgebraicNumber::AlgebraicNumber(IntPoly min_poly, int embedding_index, int precision_bits)
    : min_poly_(std::move(min_poly)), embedding_index_(embedding_index), precision_bits_(precision_bits) {
  if (embedding_index < 0 || embedding_index >= min_poly_.degree())
    throw Error(ErrorKind::InvalidArgument, "embedding_index out of range");
  roots_ = std::make_shared<const std::vector<Complex>>(complex_roots(min_poly_, precision_bits));
}

AlgebraicNumber AlgebraicNumber::rational(const Integer& p, const Integer& q, int precision_bits) {
  if (q == 0) throw Error(ErrorKind::InvalidArgument, "zero denominator");
  return AlgebraicNumber(IntPoly({q, -p}), 0, precision_bits);
}

AlgebraicNumber AlgebraicNumber::conjugate(int k) const {
  if (k < 0 || k >= degree()) throw Error(ErrorKind::InvalidArgument, "embedding_index out of range");
  AlgebraicNumber c = *this;
  c.embedding_index_ = k;
  return c;
}

bool AlgebraicNumber::is_zero() const { return min_poly_.degree() == 1 && min_poly_.constant() == 0; }

AlgebraicNumber AlgebraicNumber::inverse() const {
  if (is_zero()) throw Error(ErrorKind::ZeroInput, "cannot invert zero");
  IntPoly rev = min_poly_.reversed();
  std::vector<Complex> rev_roots = complex_roots(rev, precision_bits_);
  PrecisionGuard guard(precision_bits_ + 64);
  const Complex target = Complex(Real(1)) / value();
  std::size_t best = 0;
  Real best_dist = abs(rev_roots[0] - target);
  for (std::size_t i = 1; i < rev_roots.size(); ++i) {
    Real dist = abs(rev_roots[i] - target);
    if (dist < best_dist) {
      best_dist = dist;
      best = i;
    }
  }
  return AlgebraicNumber(std::move(rev), static_cast<int>(best), precision_bits_);
}

Real log_mahler_measure(const IntPoly& p, int precision_bits) {
  std::vector<Complex> roots = complex_roots(p, precision_bits);
  PrecisionGuard guard(precision_bits + 32);
  Real acc = log(abs(Real(p.leading())));
  for (const auto& r : roots) {
    Real m = abs(r);
    if (m > 1) acc += log(m);
  }
  return acc;
}

namespace {

Real weil_height_of_roots(const IntPoly& p, const std::vector<Complex>& roots, int precision_bits) {
  PrecisionGuard guard(precision_bits + 32);
  Real acc = log(abs(Real(p.leading())));
  for (const auto& r : roots) {
    Real m = abs(r);
    if (m > 1) acc += log(m);
  }
  return acc / Real(static_cast<long>(p.degree()));
}

}  // namespace

Real weil_height_mp(const AlgebraicNumber& alpha) {
  return weil_height_of_roots(alpha.min_poly(), alpha.conjugates(), alpha.precision_bits());
}

double weil_height(const AlgebraicNumber& alpha) { return to_double(weil_height_mp(alpha)); }

Real toric_canonical_height_mp(const AlgebraicNumber& alpha) {
  if (alpha.is_zero()) throw Error(ErrorKind::ZeroInput, "toric height undefined at 0");
  const IntPoly rev = alpha.min_poly().reversed();
  PrecisionGuard guard(alpha.precision_bits() + 32);
  std::vector<Complex> inv_roots;
  inv_roots.reserve(alpha.conjugates().size());
  for (const auto& r : alpha.conjugates()) inv_roots.push_back(Complex(Real(1)) / r);
  Real h = weil_height_mp(alpha) + weil_height_of_roots(rev, inv_roots, alpha.precision_bits());
  return h;
}

double toric_canonical_height(const AlgebraicNumber& alpha) { return to_double(toric_canonical_height_mp(alpha)); }

int euler_phi(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "euler_phi needs n >= 1");
  int result = n;
  int m = n;
  for (int p = 2; p * p <= m; ++p) {
    if (m % p != 0) continue;
    while (m % p == 0) m /= p;
    result -= result / p;
  }
  if (m > 1) result -= result / m;
  return result;
}

std::vector<std::complex<double>> primitive_roots_of_unity(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "primitive_roots_of_unity needs N >= 1");
  std::vector<std::complex<double>> out;
  for (int k = 0; k < n; ++k) {
    if (std::gcd(k, n) != 1) continue;
    const double angle = 2.0 * pi<double>() * static_cast<double>(k) / static_cast<double>(n);
    out.emplace_back(std::cos(angle), std::sin(angle));
  }
  return out;
}

IntPoly cyclotomic_polynomial(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "cyclotomic_polynomial needs n >= 1");
  Coeffs num(static_cast<std::size_t>(n) + 1, Integer(0));
  num.front() = 1;
  num.back() = -1;
  for (int d = 1; d < n; ++d) {
    if (n % d != 0) continue;
    num = poly_exact_div(num, cyclotomic_polynomial(d).coefficients());
  }
  return IntPoly(std::move(num));
}

IntPoly power_minimal_polynomial(const IntPoly& p, int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "power must be >= 1");
  const std::size_t d = static_cast<std::size_t>(p.degree());
  const auto& c = p.coefficients();
  using Matrix = std::vector<std::vector<Rational>>;
  // Companion matrix of the monic p / a_0.
  Matrix comp(d, std::vector<Rational>(d, Rational(0)));
  for (std::size_t i = 1; i < d; ++i) comp[i][i - 1] = 1;
  for (std::size_t i = 0; i < d; ++i) comp[i][d - 1] = -Rational(c[d - i], c[0]);
  auto multiply = [d](const Matrix& a, const Matrix& b) {
    Matrix out(d, std::vector<Rational>(d, Rational(0)));
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t k = 0; k < d; ++k) {
        if (a[i][k] == 0) continue;
        for (std::size_t j = 0; j < d; ++j) out[i][j] += a[i][k] * b[k][j];
      }
    return out;
  };
  Matrix power = comp;
  for (int k = 1; k < n; ++k) power = multiply(power, comp);

  // Faddeev-LeVerrier: char poly x^d + c_1 x^(d-1) + ... + c_d.
  std::vector<Rational> charpoly(d + 1, Rational(0));
  charpoly[0] = 1;
  Matrix m(d, std::vector<Rational>(d, Rational(0)));
  for (std::size_t k = 1; k <= d; ++k) {
    Matrix am = multiply(power, m);
    for (std::size_t i = 0; i < d; ++i) am[i][i] += charpoly[k - 1];
    m = am;
    Matrix next = multiply(power, m);
    Rational trace = 0;
    for (std::size_t i = 0; i < d; ++i) trace += next[i][i];
    charpoly[k] = -trace / Rational(static_cast<long>(k));
  }
  Integer lcm_den = 1;
  for (const auto& q : charpoly) lcm_den = lcm(lcm_den, denominator(q));
  Coeffs g;
  for (const auto& q : charpoly) g.push_back(numerator(q) * (lcm_den / denominator(q)));
  g = make_primitive(std::move(g));
  Coeffs common = poly_gcd(g, poly_derivative(g));
  if (deg(common) > 0) g = poly_exact_div(g, common);
  return IntPoly(std::move(g));
}

}  // namespace semiab::algnum
