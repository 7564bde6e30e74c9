#include "semiab/elliptic/lattice.hpp"

#include <limits>
#include <numeric>

#include "semiab/algnum.hpp"
#include "semiab/complex_math.hpp"
#include "semiab/error.hpp"

namespace semiab::elliptic {

namespace {

template <class R>
using Cx = std::complex<R>;

template <class R>
int working_bits(int precision_bits) {
  if constexpr (is_multiprecision<R>::value) return precision_bits + 32;
  return 53;
}

template <class R>
R series_eps(int precision_bits) {
  if constexpr (is_multiprecision<R>::value) return cmath::two_pow<R>(-(precision_bits + 8));
  return std::numeric_limits<double>::epsilon() / 8;
}

template <class R>
Cx<R> agm(Cx<R> a, Cx<R> b, const R& eps) {
  for (int it = 0; it < 200; ++it) {
    if (cmath::abs(Cx<R>(a - b)) <= 64 * eps * cmath::abs(a)) return (a + b) / R(2);
    Cx<R> a1 = (a + b) / R(2);
    Cx<R> b1 = cmath::sqrt(Cx<R>(a * b));
    if (cmath::abs(Cx<R>(a1 - b1)) > cmath::abs(Cx<R>(a1 + b1))) b1 = -b1;
    a = a1;
    b = b1;
  }
  throw Error(ErrorKind::NoConvergence, "AGM did not converge");
}

// Lambert series sum_{n>=1} n^k q^n / (1 - q^n).
template <class R>
Cx<R> lambert(const Cx<R>& q, int k, const R& eps) {
  Cx<R> acc(0), qn(1);
  const R aq = cmath::abs(q);
  for (int n = 1; n < 100000; ++n) {
    qn *= q;
    R nk(1);
    for (int i = 0; i < k; ++i) nk *= n;
    acc += Cx<R>(nk) * qn / (Cx<R>(1) - qn);
    using std::pow;
    if (n > k && nk * cmath::abs(qn) < eps * (1 - aq)) break;
  }
  return acc;
}

template <class R>
std::array<Cx<R>, 3> eisenstein_from_q(const Cx<R>& q, const R& eps) {
  return {Cx<R>(1) - Cx<R>(24) * lambert(q, 1, eps), Cx<R>(1) + Cx<R>(240) * lambert(q, 3, eps),
          Cx<R>(1) - Cx<R>(504) * lambert(q, 5, eps)};
}

template <class R>
Cx<R> q_of(const Cx<R>& tau) {
  const R two_pi = 2 * pi<R>();
  return cmath::exp(Cx<R>(-two_pi * tau.imag(), two_pi * tau.real()));
}

// Reduce a basis so that tau = w2/w1 lies in the standard fundamental domain
// -1/2 <= Re tau < 1/2, |tau| >= 1; among bases with the same tau on the
// boundary the one with omega1 closest to the positive real axis wins.
template <class R>
void reduce_basis(Cx<R>& w1, Cx<R>& w2, const R& eps) {
  using std::abs;
  using std::floor;
  for (int it = 0; it < 1000; ++it) {
    Cx<R> tau = w2 / w1;
    if (tau.imag() < 0) {
      w2 = -w2;
      tau = -tau;
    }
    const R k = floor(tau.real() + R(0.5));
    if (k != 0) {
      w2 -= k * w1;
      tau -= Cx<R>(k);
    }
    if (cmath::norm(tau) < 1 - eps) {
      Cx<R> t = w1;
      w1 = w2;
      w2 = -t;
      continue;
    }
    break;
  }
  using std::sqrt;
  const R tol = sqrt(eps);
  if (abs((w2 / w1).real() - R(0.5)) < tol) w2 -= w1;
  std::vector<std::pair<Cx<R>, Cx<R>>> options{{w1, w2}};
  const Cx<R> tau = w2 / w1;
  if (abs(cmath::norm(tau) - 1) < tol) {
    options.push_back({w2, -w1});
    if (abs(tau.real() + R(0.5)) < tol) {
      options.push_back({w2, -w1 - w2});
      options.push_back({-w1 - w2, w1});
    }
  }
  std::size_t n = options.size();
  for (std::size_t i = 0; i < n; ++i) options.push_back({-options[i].first, -options[i].second});
  // most real first, then upper half plane
  auto better = [&tol](const Cx<R>& u, const Cx<R>& w) {
    const R du = u.real() / cmath::abs(u), dw = w.real() / cmath::abs(w);
    if (du > dw + tol) return true;
    if (dw > du + tol) return false;
    return u.imag() / cmath::abs(u) > w.imag() / cmath::abs(w) + tol;
  };
  std::size_t best = 0;
  for (std::size_t i = 1; i < options.size(); ++i)
    if (better(options[i].first, options[best].first)) best = i;
  w1 = options[best].first;
  w2 = options[best].second;
}

template <class R>
std::array<Cx<R>, 3> cubic_roots(const CurveQ& E, int bits) {
  const Integer den = mp::lcm(mp::denominator(E.a()), mp::denominator(E.b()));
  const Rational A = E.a() * Rational(den), B = E.b() * Rational(den);
  algnum::IntPoly p({den, Integer(0), mp::numerator(A), mp::numerator(B)});
  const auto roots = algnum::complex_roots(p, bits);
  return {cmath::from_mp<R>(roots[0]), cmath::from_mp<R>(roots[1]), cmath::from_mp<R>(roots[2])};
}

struct Candidate {
  std::complex<double> value;
  int first, second, sign;  // value = (W_first + sign W_second) / (sign ? 2 : 1)
};

template <class R>
Cx<R> candidate_value(const std::vector<Cx<R>>& W, const Candidate& c) {
  if (c.sign == 0) return W[static_cast<std::size_t>(c.first)];
  return (W[static_cast<std::size_t>(c.first)] + R(c.sign) * W[static_cast<std::size_t>(c.second)]) / R(2);
}

bool matches_invariants(std::complex<double> w1, std::complex<double> w2, std::complex<double> g2,
                        std::complex<double> g3) {
  reduce_basis<double>(w1, w2, 1e-13);
  const auto tau = w2 / w1;
  if (!(tau.imag() > 0.5)) return false;
  const auto e = eisenstein_from_q<double>(q_of<double>(tau), 1e-17);
  const double p = pi<double>();
  const auto c2 = 4 * std::pow(p, 4) / (3.0 * std::pow(w1, 4)) * e[1];
  const auto c3 = 8 * std::pow(p, 6) / (27.0 * std::pow(w1, 6)) * e[2];
  const double scale = std::max({1.0, std::pow(std::abs(g2), 0.5), std::pow(std::abs(g3), 1.0 / 3.0)});
  return std::abs(c2 - g2) < 1e-7 * scale * scale && std::abs(c3 - g3) < 1e-7 * scale * scale * scale;
}

template <class R>
bool near_lattice_point(const PeriodLattice<R>& L, const Cx<R>& zc) {
  const R tiny = series_eps<R>(L.precision_bits) * 1e6;
  return cmath::abs(zc) <= tiny * cmath::abs(L.omega1);
}

}  // namespace

template <class R>
PeriodLattice<R> periods(const CurveQ& E, int precision_bits) {
  if (precision_bits < 16) throw Error(ErrorKind::InvalidArgument, "precision_bits too small");
  ScopedPrecision<R> guard(working_bits<R>(precision_bits));
  const R eps = series_eps<R>(precision_bits);

  PeriodLattice<R> L;
  L.precision_bits = precision_bits;
  L.two_torsion_x = cubic_roots<R>(E, precision_bits + 32);
  const auto& e = L.two_torsion_x;
  L.g2 = Cx<R>(R(-4) * from_rational<R>(E.a()));
  L.g3 = Cx<R>(R(-4) * from_rational<R>(E.b()));
  L.discriminant = L.g2 * L.g2 * L.g2 - Cx<R>(27) * L.g3 * L.g3;

  const R p = pi<R>();
  std::vector<Cx<R>> W;
  for (int i = 0; i < 3; ++i) {
    const auto& ei = e[static_cast<std::size_t>(i)];
    const auto& ej = e[static_cast<std::size_t>((i + 1) % 3)];
    const auto& ek = e[static_cast<std::size_t>((i + 2) % 3)];
    const Cx<R> s1 = cmath::sqrt(Cx<R>(ei - ej)), s2 = cmath::sqrt(Cx<R>(ei - ek));
    for (int sgn : {1, -1}) {
      const Cx<R> m = agm(s1, Cx<R>(R(sgn) * s2), eps);
      if (cmath::abs(m) == 0) continue;
      W.push_back(Cx<R>(p) / m);
    }
  }
  std::vector<Candidate> cands;
  for (int i = 0; i < static_cast<int>(W.size()); ++i) cands.push_back({semiab::to_double(W[static_cast<std::size_t>(i)]), i, 0, 0});
  for (int i = 0; i < static_cast<int>(W.size()); ++i)
    for (int j = i + 1; j < static_cast<int>(W.size()); ++j)
      for (int sgn : {1, -1}) {
        Candidate c{{}, i, j, sgn};
        c.value = semiab::to_double(candidate_value(W, c));
        cands.push_back(c);
      }

  const auto g2d = semiab::to_double(L.g2), g3d = semiab::to_double(L.g3);
  int best_i = -1, best_j = -1;
  double best_covolume = INFINITY;
  for (std::size_t i = 0; i < cands.size(); ++i)
    for (std::size_t j = i + 1; j < cands.size(); ++j) {
      const auto w1 = cands[i].value, w2 = cands[j].value;
      if (std::abs(w1) < 1e-300 || std::abs(w2) < 1e-300) continue;
      const double cov = std::abs((std::conj(w1) * w2).imag());
      if (cov < 1e-9 * std::abs(w1) * std::abs(w2)) continue;
      if (cov >= best_covolume * (1 - 1e-9)) continue;
      if (matches_invariants(w1, w2, g2d, g3d)) {
        best_covolume = cov;
        best_i = static_cast<int>(i);
        best_j = static_cast<int>(j);
      }
    }
  if (best_i < 0) throw Error(ErrorKind::PrecisionUnreachable, "no period basis reproduces the curve invariants");

  Cx<R> w1 = candidate_value(W, cands[static_cast<std::size_t>(best_i)]);
  Cx<R> w2 = candidate_value(W, cands[static_cast<std::size_t>(best_j)]);
  reduce_basis(w1, w2, eps);
  L.omega1 = w1;
  L.omega2 = w2;
  L.tau = w2 / w1;
  L.q = q_of(L.tau);
  const auto es = eisenstein_from_q(L.q, eps);
  L.eta1 = Cx<R>(p * p) * es[0] / (Cx<R>(3) * w1);
  const Cx<R> two_pi_i(R(0), 2 * p);
  L.eta2 = (L.eta1 * w2 - two_pi_i) / w1;

  // Each half period must map to a distinct root.
  const std::array<Cx<R>, 3> halves{w1 / R(2), w2 / R(2), (w1 + w2) / R(2)};
  std::array<bool, 3> used{false, false, false};
  const double tol = is_multiprecision<R>::value ? 1e-20 : 1e-8;
  for (const auto& h : halves) {
    const Cx<R> x = wp(L, h);
    bool hit = false;
    for (std::size_t k = 0; k < 3 && !hit; ++k) {
      const double scale = std::max(1.0, std::abs(semiab::to_double(e[k])));
      if (!used[k] && std::abs(semiab::to_double(Cx<R>(x - e[k]))) < tol * scale) used[k] = hit = true;
    }
    if (!hit) throw Error(ErrorKind::PrecisionUnreachable, "half periods do not reproduce the 2-torsion");
  }
  return L;
}

PeriodLattice<double> to_double(const PeriodLattice<Real>& L) {
  PeriodLattice<double> d;
  d.omega1 = semiab::to_double(L.omega1);
  d.omega2 = semiab::to_double(L.omega2);
  d.tau = semiab::to_double(L.tau);
  d.eta1 = semiab::to_double(L.eta1);
  d.eta2 = semiab::to_double(L.eta2);
  d.g2 = semiab::to_double(L.g2);
  d.g3 = semiab::to_double(L.g3);
  d.discriminant = semiab::to_double(L.discriminant);
  for (std::size_t k = 0; k < 3; ++k) d.two_torsion_x[k] = semiab::to_double(L.two_torsion_x[k]);
  d.q = semiab::to_double(L.q);
  d.precision_bits = 53;
  return d;
}

template <class R>
std::complex<R> legendre_residual(const PeriodLattice<R>& L) {
  ScopedPrecision<R> guard(working_bits<R>(L.precision_bits));
  return L.eta1 * L.omega2 - L.eta2 * L.omega1 - Cx<R>(R(0), 2 * pi<R>());
}

template <class R>
std::pair<R, R> lattice_coordinates(const PeriodLattice<R>& L, const std::complex<R>& z) {
  ScopedPrecision<R> guard(working_bits<R>(L.precision_bits));
  Cx<R> zz = z;
  cmath::upgrade(zz);
  const Cx<R> r = zz / L.omega1;
  const R t = r.imag() / L.tau.imag();
  const R s = r.real() - t * L.tau.real();
  return {s, t};
}

template <class R>
std::complex<R> from_coordinates(const PeriodLattice<R>& L, const R& s, const R& t) {
  ScopedPrecision<R> guard(working_bits<R>(L.precision_bits));
  R ss = s, tt = t;
  cmath::upgrade(ss);
  cmath::upgrade(tt);
  return ss * L.omega1 + tt * L.omega2;
}

template <class R>
std::complex<R> eta_hat(const PeriodLattice<R>& L, const std::complex<R>& z) {
  const auto [s, t] = lattice_coordinates(L, z);
  ScopedPrecision<R> guard(working_bits<R>(L.precision_bits));
  return s * L.eta1 + t * L.eta2;
}

template <class R>
std::complex<R> reduce(const PeriodLattice<R>& L, const std::complex<R>& z) {
  using std::floor;
  auto [s, t] = lattice_coordinates(L, z);
  ScopedPrecision<R> guard(working_bits<R>(L.precision_bits));
  s -= floor(s);
  t -= floor(t);
  if (s >= 1) s -= 1;
  if (t >= 1) t -= 1;
  return s * L.omega1 + t * L.omega2;
}

template <class R>
std::complex<R> reduce_centered(const PeriodLattice<R>& L, const std::complex<R>& z) {
  using std::floor;
  auto [s, t] = lattice_coordinates(L, z);
  ScopedPrecision<R> guard(working_bits<R>(L.precision_bits));
  s -= floor(s + R(0.5));
  t -= floor(t + R(0.5));
  return s * L.omega1 + t * L.omega2;
}

template <class R>
std::complex<R> add_parameters(const PeriodLattice<R>& L, const std::complex<R>& z1, const std::complex<R>& z2) {
  return reduce(L, Cx<R>(z1 + z2));
}

template <class R>
std::complex<R> mul_parameter(const PeriodLattice<R>& L, long n, const std::complex<R>& z) {
  Cx<R> base = reduce(L, n < 0 ? Cx<R>(-z) : z);
  unsigned long k = n < 0 ? static_cast<unsigned long>(-(n + 1)) + 1 : static_cast<unsigned long>(n);
  Cx<R> acc(0);
  while (k) {
    if (k & 1) acc = add_parameters(L, acc, base);
    k >>= 1;
    if (k) base = add_parameters(L, base, base);
  }
  return acc;
}

template <class R>
std::array<std::complex<R>, 3> eisenstein(const PeriodLattice<R>& L) {
  ScopedPrecision<R> guard(working_bits<R>(L.precision_bits));
  return eisenstein_from_q(L.q, series_eps<R>(L.precision_bits));
}

namespace {

// Shared trigonometric setup on the centered representative.
template <class R>
struct TrigSetup {
  Cx<R> k;      // pi / omega1
  Cx<R> v;      // k z
  Cx<R> w;      // exp(2 i v)
  R growth;     // max(|w|, 1/|w|)
};

template <class R>
TrigSetup<R> trig_setup(const PeriodLattice<R>& L, const Cx<R>& zc) {
  TrigSetup<R> s;
  s.k = Cx<R>(pi<R>()) / L.omega1;
  s.v = s.k * zc;
  s.w = cmath::exp(Cx<R>(R(0), R(2)) * s.v);
  const R aw = cmath::abs(s.w);
  s.growth = aw > 1 ? aw : R(1) / aw;
  return s;
}

}  // namespace

template <class R>
std::complex<R> wp(const PeriodLattice<R>& L, const std::complex<R>& z) {
  Cx<R> zc = reduce_centered(L, z);
  ScopedPrecision<R> guard(working_bits<R>(L.precision_bits));
  if (near_lattice_point(L, zc)) throw Error(ErrorKind::PoleAtLatticePoint, "wp has a pole on the lattice");
  const R eps = series_eps<R>(L.precision_bits);
  const auto T = trig_setup(L, zc);
  const Cx<R> sv = cmath::sin(T.v);
  const auto es = eisenstein_from_q(L.q, eps);
  Cx<R> acc(0), qn(1), wn(1), wi(1);
  const Cx<R> winv = Cx<R>(1) / T.w;
  const R aq = cmath::abs(L.q);
  R bound(1);
  for (int n = 1; n < 100000; ++n) {
    qn *= L.q;
    wn *= T.w;
    wi *= winv;
    bound *= aq * T.growth;
    acc += Cx<R>(R(n)) * qn / (Cx<R>(1) - qn) * (wn + wi) / R(2);
    if (n > 2 && n * bound < eps * (1 - aq)) break;
  }
  return T.k * T.k * (-es[0] / R(3) + Cx<R>(1) / (sv * sv) - Cx<R>(8) * acc);
}

template <class R>
std::complex<R> wp_prime(const PeriodLattice<R>& L, const std::complex<R>& z) {
  Cx<R> zc = reduce_centered(L, z);
  ScopedPrecision<R> guard(working_bits<R>(L.precision_bits));
  if (near_lattice_point(L, zc)) throw Error(ErrorKind::PoleAtLatticePoint, "wp' has a pole on the lattice");
  const R eps = series_eps<R>(L.precision_bits);
  const auto T = trig_setup(L, zc);
  const Cx<R> sv = cmath::sin(T.v), cv = cmath::cos(T.v);
  Cx<R> acc(0), qn(1), wn(1), wi(1);
  const Cx<R> winv = Cx<R>(1) / T.w;
  const R aq = cmath::abs(L.q);
  R bound(1);
  for (int n = 1; n < 100000; ++n) {
    qn *= L.q;
    wn *= T.w;
    wi *= winv;
    bound *= aq * T.growth;
    acc += Cx<R>(R(n) * n) * qn / (Cx<R>(1) - qn) * (wn - wi) / Cx<R>(R(0), R(2));
    if (n > 3 && R(n) * n * bound < eps * (1 - aq)) break;
  }
  const Cx<R> k3 = T.k * T.k * T.k;
  return R(-2) * k3 * cv / (sv * sv * sv) + R(16) * k3 * acc;
}

namespace {

// theta_1(v) / theta_1'(0) with the common factor q_h^(1/4) removed:
//   sum (-1)^n q_h^(n(n+1)) sin((2n+1)v) / sum (-1)^n (2n+1) q_h^(n(n+1)).
template <class R>
Cx<R> theta_ratio(const PeriodLattice<R>& L, const Cx<R>& v, const R& eps) {
  const R p = pi<R>();
  const Cx<R> qh = cmath::exp(Cx<R>(-p * L.tau.imag(), p * L.tau.real()));
  const Cx<R> qh2 = qh * qh;
  const Cx<R> e = cmath::exp(Cx<R>(R(0), R(1)) * v);
  const Cx<R> e2 = e * e, einv = Cx<R>(1) / e, e2inv = einv * einv;
  const R ae = cmath::abs(e);
  const R growth = ae > 1 ? ae : R(1) / ae;
  const R aqh2 = cmath::abs(qh2);
  const Cx<R> two_i(R(0), R(2));
  Cx<R> num(0), den(0);
  Cx<R> coef(1), step = qh2;
  Cx<R> ep = e, em = einv;
  R mag(1), mag_step = aqh2, gpow = growth;
  for (int n = 0; n < 100000; ++n) {
    num += coef * (ep - em) / two_i;
    den += coef * R(2 * n + 1);
    mag *= mag_step;
    mag_step *= aqh2;
    gpow *= growth * growth;
    if (n > 0 && mag * gpow * (2 * n + 3) < eps * cmath::abs(den) * (1 - aqh2)) break;
    coef = -coef * step;
    step *= qh2;
    ep *= e2;
    em *= e2inv;
  }
  return num / den;
}

}  // namespace

template <class R>
std::complex<R> sigma(const PeriodLattice<R>& L, const std::complex<R>& z) {
  ScopedPrecision<R> guard(working_bits<R>(L.precision_bits));
  Cx<R> zz = z;
  cmath::upgrade(zz);
  const R eps = series_eps<R>(L.precision_bits);
  const Cx<R> v = Cx<R>(pi<R>()) / L.omega1 * zz;
  const Cx<R> pref = L.omega1 / pi<R>() * cmath::exp(Cx<R>(L.eta1 * zz * zz / (R(2) * L.omega1)));
  return pref * theta_ratio(L, v, eps);
}

template <class R>
R neron_normalization_constant(const PeriodLattice<R>& L) {
  using std::log;
  ScopedPrecision<R> guard(working_bits<R>(L.precision_bits));
  return -log(cmath::abs(L.discriminant)) / 12;
}

template <class R>
R neron_local_archimedean(const PeriodLattice<R>& L, const std::complex<R>& z) {
  using std::log;
  const Cx<R> zc = reduce_centered(L, z);
  const Cx<R> eh = eta_hat(L, zc);
  ScopedPrecision<R> guard(working_bits<R>(L.precision_bits));
  if (near_lattice_point(L, zc)) throw Error(ErrorKind::PoleAtLatticePoint, "Neron function has a pole at the origin");
  const R eps = series_eps<R>(L.precision_bits);
  const Cx<R> v = Cx<R>(pi<R>()) / L.omega1 * zc;
  const R log_sigma = log(cmath::abs(L.omega1) / pi<R>()) + (L.eta1 * zc * zc / (R(2) * L.omega1)).real() +
                      log(cmath::abs(theta_ratio(L, v, eps)));
  const R log_abs = -(zc * eh).real() / 2 + log_sigma;
  return -log_abs + neron_normalization_constant(L);
}

template <class R>
std::pair<std::complex<R>, std::complex<R>> point_from_parameter(const PeriodLattice<R>& L,
                                                                 const std::complex<R>& z) {
  const Cx<R> x = wp(L, z);
  const Cx<R> y = wp_prime(L, z) / R(2);
  return {x, y};
}

template <class R>
std::complex<R> elliptic_log(const PeriodLattice<R>& L, const std::complex<R>& x_in, const std::complex<R>& y_in) {
  ScopedPrecision<R> guard(working_bits<R>(L.precision_bits));
  Cx<R> x = x_in, y = y_in;
  cmath::upgrade(x);
  cmath::upgrade(y);
  const double scale_x = std::max(1.0, std::abs(semiab::to_double(x)));
  if (std::abs(semiab::to_double(y)) < 1e-9 * std::pow(scale_x, 1.5)) {
    // near a 2-torsion point: pick the half period with the closest wp
    const std::array<Cx<R>, 3> halves{L.omega1 / R(2), L.omega2 / R(2), (L.omega1 + L.omega2) / R(2)};
    std::size_t best = 0;
    R best_d = cmath::abs(Cx<R>(wp(L, halves[0]) - x));
    for (std::size_t k = 1; k < 3; ++k) {
      const R d = cmath::abs(Cx<R>(wp(L, halves[k]) - x));
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    const double err = semiab::to_double(best_d);
    if (err > 1e-6 * scale_x) throw Error(ErrorKind::InvalidArgument, "y = 0 but x is not a 2-torsion abscissa");
    if (semiab::to_double(cmath::abs(y)) == 0.0) return reduce(L, halves[best]);
  }

  // coarse start from a double-precision grid search
  PeriodLattice<double> Ld;
  if constexpr (is_multiprecision<R>::value) Ld = elliptic::to_double(L);
  else Ld = L;
  const auto xd = semiab::to_double(x), yd = semiab::to_double(y);
  const int n = 16;
  std::vector<std::pair<double, std::complex<double>>> starts;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double s = (i + 0.5) / n - 0.5, t = (j + 0.5) / n - 0.5;
      const auto z = s * Ld.omega1 + t * Ld.omega2;
      const auto px = wp(Ld, z), py = wp_prime(Ld, z) / 2.0;
      starts.push_back({std::abs(px - xd) / scale_x + std::abs(py - yd) / std::pow(scale_x, 1.5), z});
    }
  std::sort(starts.begin(), starts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  const R eps = series_eps<R>(L.precision_bits);
  const R step_tol = eps * 1024 * cmath::abs(L.omega1);
  for (std::size_t attempt = 0; attempt < std::min<std::size_t>(starts.size(), 8); ++attempt) {
    Cx<R> z(R(starts[attempt].second.real()), R(starts[attempt].second.imag()));
    bool ok = false;
    try {
      for (int it = 0; it < 200; ++it) {
        const Cx<R> f = wp(L, z) - x;
        const Cx<R> fp = wp_prime(L, z);
        const Cx<R> dz = f / fp;
        z -= dz;
        z = reduce_centered(L, z);
        if (cmath::abs(dz) < step_tol) {
          ok = true;
          break;
        }
      }
    } catch (const Error&) {
      ok = false;
    }
    if (!ok) continue;
    const Cx<R> py = wp_prime(L, z) / R(2);
    if (cmath::abs(Cx<R>(py - y)) > cmath::abs(Cx<R>(py + y))) z = -z;
    const double resid = std::abs(semiab::to_double(Cx<R>(wp(L, z) - x))) / scale_x;
    if (resid < 1e-6) return reduce(L, z);
  }
  throw Error(ErrorKind::NoConvergence, "elliptic logarithm did not converge");
}

template <class R>
std::complex<R> elliptic_log(const PeriodLattice<R>& L, const RationalPoint& P) {
  if (P.infinity) return Cx<R>(0);
  ScopedPrecision<R> guard(working_bits<R>(L.precision_bits));
  return elliptic_log(L, Cx<R>(from_rational<R>(P.x)), Cx<R>(from_rational<R>(P.y)));
}

template <class R>
std::vector<std::complex<R>> torsion_parameters(const PeriodLattice<R>& L, int N, bool primitive) {
  if (N < 1) throw Error(ErrorKind::InvalidArgument, "torsion order must be >= 1");
  ScopedPrecision<R> guard(working_bits<R>(L.precision_bits));
  std::vector<Cx<R>> out;
  out.reserve(static_cast<std::size_t>(N) * static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      if (primitive && std::gcd(std::gcd(i, j), N) != 1) continue;
      out.push_back((R(i) * L.omega1 + R(j) * L.omega2) / R(N));
    }
  return out;
}

std::size_t primitive_torsion_count(int N) {
  if (N < 1) throw Error(ErrorKind::InvalidArgument, "torsion order must be >= 1");
  std::size_t count = static_cast<std::size_t>(N) * static_cast<std::size_t>(N);
  int m = N;
  for (int p = 2; m > 1; ++p) {
    if (m % p) continue;
    while (m % p == 0) m /= p;
    count = count / static_cast<std::size_t>(p * p) * static_cast<std::size_t>(p * p - 1);
  }
  return count;
}

#define SEMIAB_INSTANTIATE_LATTICE(R)                                                                             \
  template PeriodLattice<R> periods<R>(const CurveQ&, int);                                                       \
  template std::complex<R> legendre_residual<R>(const PeriodLattice<R>&);                                         \
  template std::pair<R, R> lattice_coordinates<R>(const PeriodLattice<R>&, const std::complex<R>&);               \
  template std::complex<R> from_coordinates<R>(const PeriodLattice<R>&, const R&, const R&);                      \
  template std::complex<R> eta_hat<R>(const PeriodLattice<R>&, const std::complex<R>&);                           \
  template std::complex<R> reduce<R>(const PeriodLattice<R>&, const std::complex<R>&);                            \
  template std::complex<R> reduce_centered<R>(const PeriodLattice<R>&, const std::complex<R>&);                   \
  template std::complex<R> add_parameters<R>(const PeriodLattice<R>&, const std::complex<R>&,                     \
                                             const std::complex<R>&);                                             \
  template std::complex<R> mul_parameter<R>(const PeriodLattice<R>&, long, const std::complex<R>&);               \
  template std::complex<R> wp<R>(const PeriodLattice<R>&, const std::complex<R>&);                                \
  template std::complex<R> wp_prime<R>(const PeriodLattice<R>&, const std::complex<R>&);                          \
  template std::complex<R> sigma<R>(const PeriodLattice<R>&, const std::complex<R>&);                             \
  template std::array<std::complex<R>, 3> eisenstein<R>(const PeriodLattice<R>&);                                 \
  template R neron_local_archimedean<R>(const PeriodLattice<R>&, const std::complex<R>&);                         \
  template R neron_normalization_constant<R>(const PeriodLattice<R>&);                                            \
  template std::pair<std::complex<R>, std::complex<R>> point_from_parameter<R>(const PeriodLattice<R>&,           \
                                                                               const std::complex<R>&);           \
  template std::complex<R> elliptic_log<R>(const PeriodLattice<R>&, const std::complex<R>&,                       \
                                           const std::complex<R>&);                                               \
  template std::complex<R> elliptic_log<R>(const PeriodLattice<R>&, const RationalPoint&);                        \
  template std::vector<std::complex<R>> torsion_parameters<R>(const PeriodLattice<R>&, int, bool);

SEMIAB_INSTANTIATE_LATTICE(double)
SEMIAB_INSTANTIATE_LATTICE(Real)

}  // namespace semiab::elliptic
