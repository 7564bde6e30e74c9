#include "semiab/semiabelian.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "semiab/error.hpp"
#include "semiab/elliptic/height.hpp"
#include "semiab/hash.hpp"

namespace semiab::semi {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;
constexpr double kSnap = 1e-12;

std::uint64_t model_tag(const CurveQ& E, C u, std::string_view extra = {}) {
  return Fnv1a().add(E.to_string()).add(u.real()).add(u.imag()).add(extra).value();
}

GModel assemble(const CurveQ& E, const PeriodLattice<double>& L, C u, int bits, std::string_view extra = {}) {
  GModel m;
  m.curve = E;
  m.lattice = L;
  m.u = u;
  m.eta1u = L.eta1 * u;
  m.eta2u = L.eta2 * u;
  m.precision_bits = bits;
  const auto [s, t] = elliptic::lattice_coordinates(L, u);
  m.split = std::abs(s - std::round(s)) < kSnap && std::abs(t - std::round(t)) < kSnap;
  m.tag = model_tag(E, u, extra);
  return m;
}

PeriodLattice<double> lattice_for(const CurveQ& E, int bits) {
  return elliptic::to_double(elliptic::periods<Real>(E, bits));
}

// floor with values within kSnap below an integer rounded up
double snapped_floor(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) < kSnap) return r;
  return std::floor(x);
}

void check_model(const GModel& m, const GPoint& p) {
  if (p.model_tag != m.tag) throw Error(ErrorKind::ModelMismatch, "point belongs to a different model");
}

void check_fiber(const GPoint& p) {
  if (p.w == C(0.0) || !std::isfinite(std::abs(p.w)))
    throw Error(ErrorKind::FiberZero, "fiber coordinate must be finite and nonzero");
}

std::uint64_t splitmix(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

GModel build_extension(const CurveQ& E, C u, int precision_bits) {
  return assemble(E, lattice_for(E, precision_bits), u, precision_bits);
}

GModel build_extension(const CurveQ& E, const RationalPoint& Q, int precision_bits) {
  elliptic::require_on_curve(E, Q);
  const auto Lm = elliptic::periods<Real>(E, precision_bits);
  const C u = Q.infinity ? C(0.0) : to_double(elliptic::elliptic_log(Lm, Q));
  GModel m = assemble(E, elliptic::to_double(Lm), u, precision_bits);
  m.class_point = Q;
  return m;
}

GModel build_extension_coords(const CurveQ& E, double s, double t, int precision_bits) {
  const auto L = lattice_for(E, precision_bits);
  return assemble(E, L, elliptic::from_coordinates(L, s, t), precision_bits);
}

C automorphy_exponent(const GModel& m, C lambda) { return elliptic::eta_hat(m.lattice, lambda) * m.u; }

C automorphy_factor(const GModel& m, C lambda) { return std::exp(automorphy_exponent(m, lambda)); }

double cocycle_residual(const GModel& m) {
  const C w1 = m.lattice.omega1, w2 = m.lattice.omega2;
  double worst = 0;
  for (auto [a, b] : std::vector<std::pair<C, C>>{{w1, w2}, {w1, w1}, {w2, -w1}, {2.0 * w1 + w2, w2 - 3.0 * w1}}) {
    const C d = automorphy_exponent(m, a + b) - automorphy_exponent(m, a) - automorphy_exponent(m, b);
    worst = std::max(worst, std::abs(d) / (1 + std::abs(automorphy_exponent(m, a + b))));
  }
  return worst;
}

GPoint identity(const GModel& m) { return {C(0.0), C(1.0), m.tag}; }

GPoint make_point(const GModel& m, C z, C w) { return reduce(m, GPoint{z, w, m.tag}); }

GPoint reduce(const GModel& m, const GPoint& p) {
  check_model(m, p);
  check_fiber(p);
  const auto [s, t] = elliptic::lattice_coordinates(m.lattice, p.z);
  const double fs = snapped_floor(s), ft = snapped_floor(t);
  const double sr = std::max(0.0, s - fs), tr = std::max(0.0, t - ft);
  GPoint r;
  r.z = elliptic::from_coordinates(m.lattice, sr, tr);
  r.w = p.w * std::exp(-(fs * m.eta1u + ft * m.eta2u));
  r.model_tag = m.tag;
  return r;
}

GPoint from_coords(const GModel& m, const TorusCoords& c) {
  if (c.v == C(0.0)) throw Error(ErrorKind::FiberZero, "fiber coordinate must be nonzero");
  const double s = c.s - snapped_floor(c.s), t = c.t - snapped_floor(c.t);
  GPoint p;
  p.z = elliptic::from_coordinates(m.lattice, std::max(0.0, s), std::max(0.0, t));
  p.w = c.v * std::exp(std::max(0.0, s) * m.eta1u + std::max(0.0, t) * m.eta2u);
  p.model_tag = m.tag;
  return p;
}

TorusCoords coords(const GModel& m, const GPoint& p) {
  check_model(m, p);
  check_fiber(p);
  const auto [s, t] = elliptic::lattice_coordinates(m.lattice, p.z);
  TorusCoords c;
  c.v = p.w * std::exp(-(s * m.eta1u + t * m.eta2u));
  c.s = s - snapped_floor(s);
  c.t = t - snapped_floor(t);
  if (c.s < 0) c.s = 0;
  if (c.t < 0) c.t = 0;
  return c;
}

GPoint g_add(const GModel& m, const GPoint& p, const GPoint& q) {
  check_model(m, p);
  check_model(m, q);
  check_fiber(p);
  check_fiber(q);
  return make_point(m, p.z + q.z, p.w * q.w);
}

GPoint g_neg(const GModel& m, const GPoint& p) {
  check_model(m, p);
  check_fiber(p);
  return make_point(m, -p.z, 1.0 / p.w);
}

GPoint g_sub(const GModel& m, const GPoint& p, const GPoint& q) { return g_add(m, p, g_neg(m, q)); }

GPoint g_mul(const GModel& m, long n, const GPoint& p) {
  GPoint base = n < 0 ? g_neg(m, p) : reduce(m, p);
  unsigned long k = n < 0 ? static_cast<unsigned long>(-n) : static_cast<unsigned long>(n);
  GPoint acc = identity(m);
  while (k) {
    if (k & 1) acc = g_add(m, acc, base);
    k >>= 1;
    if (k) base = g_add(m, base, base);
  }
  return acc;
}

bool same_point(const GModel& m, const GPoint& p, const GPoint& q, double tol) {
  const TorusCoords a = coords(m, p), b = coords(m, q);
  auto circ = [](double x) { return std::abs(x - std::round(x)); };
  return circ(a.s - b.s) < tol && circ(a.t - b.t) < tol && std::abs(a.v - b.v) < tol * std::abs(a.v);
}

double weil_lambda(const GModel& m, const GPoint& p) {
  check_model(m, p);
  check_fiber(p);
  return std::log(std::abs(p.w)) - (elliptic::eta_hat(m.lattice, p.z) * m.u).real();
}

double archimedean_fiber_height(const GModel& m, const GPoint& p) { return std::abs(weil_lambda(m, p)); }

double canonical_height_fiber0(const algnum::AlgebraicNumber& alpha) { return algnum::toric_canonical_height(alpha); }

double class_height(const GModel& m) {
  if (m.class_point) return elliptic::neron_tate(m.curve, *m.class_point, m.precision_bits);
  const auto [s, t] = elliptic::lattice_coordinates(m.lattice, m.u);
  for (int d = 1; d <= 1024; ++d)
    if (std::abs(d * s - std::round(d * s)) < 1e-10 && std::abs(d * t - std::round(d * t)) < 1e-10) return 0.0;
  throw Error(ErrorKind::UnsupportedPointClass, "extension class is neither torsion nor a known rational point");
}

TorsionIndex torsion_index(int N, std::size_t flat) {
  const auto n = static_cast<std::size_t>(N);
  return {N, static_cast<int>(flat / (n * n)), static_cast<int>((flat / n) % n), static_cast<int>(flat % n)};
}

bool is_primitive(const TorsionIndex& x) { return std::gcd(std::gcd(std::gcd(x.i, x.j), x.k), x.N) == 1; }

GPoint torsion_point(const GModel& m, const TorsionIndex& x) {
  TorusCoords c;
  c.s = double(x.i) / x.N;
  c.t = double(x.j) / x.N;
  c.v = std::polar(1.0, kTwoPi * x.k / x.N);
  return from_coords(m, c);
}

std::vector<GPoint> torsion_points_G(int N, const GModel& m, bool primitive) {
  if (N < 1) throw Error(ErrorKind::InvalidArgument, "N must be positive");
  const auto n = static_cast<std::size_t>(N);
  std::vector<GPoint> out;
  out.reserve(primitive ? primitive_torsion_count_G(N) : n * n * n);
  for (std::size_t f = 0; f < n * n * n; ++f) {
    const TorsionIndex x = torsion_index(N, f);
    if (!primitive || is_primitive(x)) out.push_back(torsion_point(m, x));
  }
  return out;
}

std::size_t primitive_torsion_count_G(int N) {
  // Jordan totient J_3(N) = N^3 prod (1 - p^-3)
  double r = double(N) * N * N;
  int n = N;
  for (int p = 2; p * p <= n; ++p)
    if (n % p == 0) {
      r *= 1.0 - 1.0 / (double(p) * p * p);
      while (n % p == 0) n /= p;
    }
  if (n > 1) r *= 1.0 - 1.0 / (double(n) * n * n);
  return static_cast<std::size_t>(std::llround(r));
}

std::vector<GPoint> max_compact_sample(std::size_t count, const GModel& m, std::uint64_t seed) {
  if (count < 1) throw Error(ErrorKind::InvalidArgument, "count must be positive");
  std::uint64_t state = seed;
  auto unit = [&] { return double(splitmix(state) >> 11) * 0x1.0p-53; };
  std::vector<GPoint> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double s = unit(), t = unit(), th = kTwoPi * unit();
    GPoint p;
    p.z = elliptic::from_coordinates(m.lattice, s, t);
    p.w = std::exp((s * m.eta1u + t * m.eta2u).real()) * std::polar(1.0, th);
    p.model_tag = m.tag;
    out.push_back(p);
  }
  return out;
}

LadderLevel ladder_level(const GModel& m, int n, long branch_a, long branch_b) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "ladder level n must be positive");
  LadderLevel lv;
  lv.n = n;
  lv.branch_a = branch_a;
  lv.branch_b = branch_b;
  const C lam = double(branch_a) * m.lattice.omega1 + double(branch_b) * m.lattice.omega2;
  lv.eta_branch = double(branch_a) * m.lattice.eta1 + double(branch_b) * m.lattice.eta2;
  lv.u_n = (m.u + lam) / double(n);
  const std::string extra = "ladder:" + std::to_string(m.tag) + ":" + std::to_string(n) + ":" +
                            std::to_string(branch_a) + ":" + std::to_string(branch_b);
  lv.model = assemble(m.curve, m.lattice, lv.u_n, m.precision_bits, extra);
  return lv;
}

GPoint phi_n(const GModel& base, const LadderLevel& level, const GPoint& p) {
  check_model(level.model, p);
  check_fiber(p);
  return make_point(base, p.z, std::pow(p.w, level.n) * std::exp(-level.eta_branch * p.z));
}

std::vector<GPoint> phi_n_preimages(const GModel& base, const LadderLevel& level, const GPoint& p) {
  check_model(base, p);
  check_fiber(p);
  const C target = p.w * std::exp(level.eta_branch * p.z);
  const C root = std::exp(std::log(target) / double(level.n));
  std::vector<GPoint> out;
  for (int k = 0; k < level.n; ++k)
    out.push_back(make_point(level.model, p.z, root * std::polar(1.0, kTwoPi * k / level.n)));
  return out;
}

std::vector<GPoint> ladder_kernel(const LadderLevel& level) {
  std::vector<GPoint> out;
  for (int k = 0; k < level.n; ++k) out.push_back(make_point(level.model, C(0.0), std::polar(1.0, kTwoPi * k / level.n)));
  return out;
}

double ladder_lambda_residual(const GModel& base, const LadderLevel& level, const GPoint& p) {
  return level.n * weil_lambda(level.model, p) - weil_lambda(base, phi_n(base, level, p));
}

double ladder_cocycle_residual(const GModel& base, const LadderLevel& level) {
  double worst = 0;
  for (C lam : {base.lattice.omega1, base.lattice.omega2}) {
    C d = double(level.n) * automorphy_exponent(level.model, lam) - level.eta_branch * lam -
          automorphy_exponent(base, lam);
    d.imag(std::remainder(d.imag(), kTwoPi));
    worst = std::max(worst, std::abs(d));
  }
  return worst;
}

double point_height_ladder(const LadderLevel& level, const ExactPoint& x) {
  if (std::holds_alternative<TorsionClass>(x)) return 0.0;
  if (const auto* f = std::get_if<IdentityFiberClass>(&x)) return canonical_height_fiber0(f->alpha) / level.n;
  throw Error(ErrorKind::UnsupportedPointClass, "only torsion and identity-fiber points have exact heights");
}

}  // namespace semiab::semi
