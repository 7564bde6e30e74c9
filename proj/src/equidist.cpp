#include "semiab/equidist.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <cmath>
#include <numbers>
#include <numeric>
#include <thread>

#include <fmt/format.h>

#include "semiab/complex_math.hpp"
#include "semiab/elliptic/height.hpp"
#include "semiab/elliptic/lattice.hpp"
#include "semiab/error.hpp"
#include "semiab/summation.hpp"

namespace semiab::equidist {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

int dims(Group g) { return g == Group::G ? 3 : g == Group::E ? 2 : 1; }

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// Enumeration of an orbit by flat index; points of a division tower or of
// the torsion subgroup indexed by (i, j, k) in [0, M)^dims.
struct Enumerator {
  const OrbitSpec& spec;
  const GModel& m;
  std::size_t M = 1;
  std::size_t total = 0;
  C root{1.0, 0.0};  // principal M-th root of the tower base fiber

  Enumerator(const OrbitSpec& s, const GModel& model) : spec(s), m(model) {
    switch (spec.kind) {
      case OrbitKind::PrimitiveTorsion:
      case OrbitKind::FullTorsion:
        if (spec.N < 1) throw Error(ErrorKind::InvalidArgument, "torsion order must be positive");
        M = static_cast<std::size_t>(spec.N);
        total = ipow(M, dims(spec.group));
        break;
      case OrbitKind::DivisionTower:
        if (spec.n < 1 || spec.depth < 0) throw Error(ErrorKind::InvalidArgument, "tower needs n >= 1, depth >= 0");
        M = ipow(static_cast<std::size_t>(spec.n), spec.depth);
        total = ipow(M, dims(spec.group));
        if (spec.x0.v == C(0.0)) throw Error(ErrorKind::FiberZero, "tower base has zero fiber");
        root = std::exp(std::log(spec.x0.v) / double(M));
        break;
      case OrbitKind::CustomList:
        total = spec.custom.size();
        break;
    }
  }

  bool keep(std::size_t flat) const {
    const bool torsion = spec.kind == OrbitKind::PrimitiveTorsion;
    if (torsion) {
      const auto [i, j, k] = split(flat);
      const int g = std::gcd(std::gcd(std::gcd(int(i), int(j)), int(k)), spec.N);
      if (g != 1) return false;
    }
    if (spec.subsample > 0 && spec.subsample < double(total)) {
      const double p = spec.subsample / double(total);
      const double u = double(mix(spec.seed ^ mix(flat)) >> 11) * 0x1.0p-53;
      if (u >= p) return false;
    }
    return true;
  }

  std::array<std::size_t, 3> split(std::size_t flat) const {
    switch (spec.group) {
      case Group::Gm: return {0, 0, flat};
      case Group::E: return {flat / M, flat % M, 0};
      case Group::G: break;
    }
    return {flat / (M * M), (flat / M) % M, flat % M};
  }

  OrbitPoint make(std::size_t flat) const {
    OrbitPoint op;
    if (spec.kind == OrbitKind::CustomList) {
      op.point = semi::reduce(m, spec.custom[flat]);
    } else {
      const auto [i, j, k] = split(flat);
      TorusCoords c;
      const double Md = double(M);
      if (spec.kind == OrbitKind::DivisionTower) {
        c.s = spec.group == Group::Gm ? 0.0 : (spec.x0.s + double(i)) / Md;
        c.t = spec.group == Group::Gm ? 0.0 : (spec.x0.t + double(j)) / Md;
        c.v = spec.group == Group::E ? C(1.0) : root * std::polar(1.0, kTwoPi * double(k) / Md);
      } else {
        c.s = double(i) / Md;
        c.t = double(j) / Md;
        c.v = std::polar(1.0, kTwoPi * double(k) / Md);
      }
      op.point = semi::from_coords(m, c);
    }
    op.coords = semi::coords(m, op.point);
    op.height = semi::archimedean_fiber_height(m, op.point);
    return op;
  }
};

template <class R>
R floor_of(const R& x) {
  using std::floor;
  return floor(x);
}

// Continued-fraction convergents of x with denominators below 2^max_bits.
std::vector<Rational> convergents(Real x, int max_bits) {
  std::vector<Rational> out;
  Integer p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  const Integer qmax = Integer(1) << max_bits;
  for (int k = 0; k < 4 * max_bits; ++k) {
    const Real a = floor_of(x);
    const Integer ai = a.convert_to<Integer>();
    const Integer p2 = ai * p1 + p0, q2 = ai * q1 + q0;
    if (q2 > qmax) break;
    out.emplace_back(p2, q2);
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const Real frac = x - a;
    if (frac == 0 || abs(frac) < Real(1e-300)) break;
    x = 1 / frac;
  }
  return out;
}

std::optional<Rational> rational_sqrt(const Rational& r) {
  if (r < 0) return std::nullopt;
  const Integer n = mp::numerator(r), d = mp::denominator(r);
  const Integer sn = mp::sqrt(n), sd = mp::sqrt(d);
  if (sn * sn != n || sd * sd != d) return std::nullopt;
  return Rational(sn, sd);
}

}  // namespace

std::string to_string(OrbitKind k) {
  switch (k) {
    case OrbitKind::PrimitiveTorsion: return "primitive_torsion";
    case OrbitKind::FullTorsion: return "full_torsion";
    case OrbitKind::DivisionTower: return "division_tower";
    case OrbitKind::CustomList: return "custom_list";
  }
  return "primitive_torsion";
}

OrbitKind orbit_kind_from_string(const std::string& s) {
  for (auto k : {OrbitKind::PrimitiveTorsion, OrbitKind::FullTorsion, OrbitKind::DivisionTower, OrbitKind::CustomList})
    if (to_string(k) == s) return k;
  throw Error(ErrorKind::Config, "unknown orbit kind '" + s + "'");
}

std::size_t orbit_size(const OrbitSpec& spec) {
  switch (spec.kind) {
    case OrbitKind::PrimitiveTorsion: {
      // Jordan totient J_d(N)
      const int d = dims(spec.group);
      double r = double(ipow(static_cast<std::size_t>(spec.N), d));
      int n = spec.N;
      for (int p = 2; p <= n; ++p)
        if (n % p == 0) {
          r *= 1.0 - 1.0 / double(ipow(static_cast<std::size_t>(p), d));
          while (n % p == 0) n /= p;
        }
      return static_cast<std::size_t>(std::llround(r));
    }
    case OrbitKind::FullTorsion: return ipow(static_cast<std::size_t>(spec.N), dims(spec.group));
    case OrbitKind::DivisionTower:
      return ipow(ipow(static_cast<std::size_t>(spec.n), spec.depth), dims(spec.group));
    case OrbitKind::CustomList: return spec.custom.size();
  }
  return 0;
}

bool strictness_certified(const OrbitSpec& spec) { return spec.kind != OrbitKind::CustomList; }

std::size_t for_each_chunk(const OrbitSpec& spec, const GModel& m, std::size_t chunk_size, const ChunkVisitor& visit,
                           int threads) {
  if (chunk_size == 0) throw Error(ErrorKind::InvalidArgument, "chunk size must be positive");
  const Enumerator en(spec, m);
  const std::size_t expected =
      spec.subsample > 0 ? std::min<std::size_t>(orbit_size(spec), std::size_t(spec.subsample)) : orbit_size(spec);
  if (expected > spec.cap)
    throw Error(ErrorKind::OrbitTooLarge, fmt::format("orbit of {} points exceeds cap {}", expected, spec.cap));
  const std::size_t nchunks = (en.total + chunk_size - 1) / chunk_size;
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> emitted{0};
  auto worker = [&] {
    std::vector<OrbitPoint> buf;
    buf.reserve(chunk_size);
    for (std::size_t c = next++; c < nchunks; c = next++) {
      buf.clear();
      const std::size_t lo = c * chunk_size, hi = std::min(en.total, lo + chunk_size);
      for (std::size_t f = lo; f < hi; ++f)
        if (en.keep(f)) buf.push_back(en.make(f));
      emitted += buf.size();
      visit(c, std::span<const OrbitPoint>(buf));
    }
  };
  const int nt = std::max(1, threads);
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex mu;
    for (int t = 0; t < nt; ++t)
      pool.emplace_back([&] {
        try {
          worker();
        } catch (...) {
          std::lock_guard lk(mu);
          if (!err) err = std::current_exception();
          next = nchunks;
        }
      });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
  }
  return emitted;
}

std::vector<OrbitPoint> generate_orbit(const OrbitSpec& spec, const GModel& m) {
  const std::size_t chunk = 4096;
  std::vector<std::vector<OrbitPoint>> parts;
  const Enumerator en(spec, m);
  parts.resize((en.total + chunk - 1) / chunk);
  for_each_chunk(spec, m, chunk, [&](std::size_t c, std::span<const OrbitPoint> pts) {
    parts[c].assign(pts.begin(), pts.end());
  });
  std::vector<OrbitPoint> out;
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

C empirical_average(std::span<const OrbitPoint> orbit, const measures::TestFunction& f) {
  if (orbit.empty()) throw Error(ErrorKind::EmptyOrbit, "empty orbit");
  std::vector<C> vals;
  vals.reserve(orbit.size());
  for (const auto& p : orbit) vals.push_back(f.eval(p.coords));
  return pairwise_sum(std::span<const C>(vals)) / double(orbit.size());
}

EquidistReport run_equidist(const EquidistConfig& cfg, const GModel& m) {
  EquidistReport rep;
  rep.name = cfg.name;
  const auto chars = measures::character_set(cfg.character_bound, cfg.group);
  const int B = cfg.character_bound;
  const std::size_t nf = chars.size() + cfg.functions.size();

  std::vector<measures::TestFunction> fns;
  for (const auto& ch : chars) fns.push_back(measures::character(ch[0], ch[1], ch[2]));
  for (const auto& f : cfg.functions) fns.push_back(f);
  std::vector<measures::IntegralResult> canon;
  for (const auto& f : fns) {
    if (f.character) {
      measures::IntegralResult r;
      r.value = measures::character_integral(*f.character);
      canon.push_back(r);
    } else {
      canon.push_back(measures::g_canonical_integral(f, m, cfg.canonical, cfg.group));
    }
  }

  rep.notes.push_back("orbit proxy: the full set of points of the orbit family stands in for a Galois orbit");
  if (cfg.kind == OrbitKind::CustomList) rep.notes.push_back("custom list: strictness unchecked");
  if (cfg.subsample > 0) rep.notes.push_back(fmt::format("Bernoulli subsample of about {} points, seed {}", cfg.subsample, cfg.seed));
  rep.notes.push_back("decay is checked as non-increasing up to the configured floor");
  rep.notes.push_back("characters use their exact canonical integral; other functions use the configured quadrature");

  for (int level : cfg.levels) {
    OrbitSpec spec;
    spec.group = cfg.group;
    spec.kind = cfg.kind;
    spec.cap = cfg.max_points;
    spec.subsample = cfg.subsample;
    spec.seed = cfg.seed;
    spec.custom = cfg.custom;
    if (cfg.kind == OrbitKind::DivisionTower) {
      spec.n = cfg.tower_n;
      spec.depth = level;
      spec.x0 = cfg.tower_base;
    } else {
      spec.N = level;
    }
    const std::size_t chunk = 4096;
    const Enumerator en(spec, m);
    const std::size_t nchunks = (en.total + chunk - 1) / chunk;
    std::vector<std::vector<C>> sums(nchunks);
    std::vector<double> max_lam(nchunks, 0.0), hsum(nchunks, 0.0);
    std::vector<std::size_t> counts(nchunks, 0);

    const std::size_t emitted = for_each_chunk(
        spec, m, chunk,
        [&](std::size_t c, std::span<const OrbitPoint> pts) {
          std::vector<C> acc(nf, C(0.0));
          std::vector<C> ps(2 * B + 1), pt(2 * B + 1), pv(2 * B + 1);
          double ml = 0, hs = 0;
          for (const auto& p : pts) {
            const C es = std::polar(1.0, kTwoPi * p.coords.s), et = std::polar(1.0, kTwoPi * p.coords.t);
            const C ev = p.coords.v / std::abs(p.coords.v);
            ps[B] = pt[B] = pv[B] = 1.0;
            for (int e = 1; e <= B; ++e) {
              ps[B + e] = ps[B + e - 1] * es;
              pt[B + e] = pt[B + e - 1] * et;
              pv[B + e] = pv[B + e - 1] * ev;
              ps[B - e] = std::conj(ps[B + e]);
              pt[B - e] = std::conj(pt[B + e]);
              pv[B - e] = std::conj(pv[B + e]);
            }
            for (std::size_t f = 0; f < chars.size(); ++f) {
              const auto& ch = chars[f];
              acc[f] += ps[B + ch[0]] * pt[B + ch[1]] * pv[B + ch[2]];
            }
            for (std::size_t f = chars.size(); f < nf; ++f) acc[f] += fns[f].eval(p.coords);
            ml = std::max(ml, std::abs(semi::weil_lambda(m, p.point)));
            hs += p.height;
          }
          sums[c] = std::move(acc);
          max_lam[c] = ml;
          hsum[c] = hs;
          counts[c] = pts.size();
        },
        cfg.threads);
    if (emitted == 0) throw Error(ErrorKind::EmptyOrbit, fmt::format("orbit at level {} is empty", level));

    OrbitReport orb;
    orb.N_or_n = level;
    orb.size = emitted;
    orb.orbit_id = cfg.kind == OrbitKind::DivisionTower
                       ? fmt::format("{}/{}/n={}/depth={}", measures::to_string(cfg.group), to_string(cfg.kind), cfg.tower_n, level)
                       : fmt::format("{}/{}/N={}", measures::to_string(cfg.group), to_string(cfg.kind), level);
    orb.strictness_checked = cfg.kind != OrbitKind::CustomList;
    orb.assumption = orb.strictness_checked ? "orbit proxy" : "orbit proxy; strictness unchecked";
    PairwiseAccumulator<double> hacc;
    for (std::size_t c = 0; c < nchunks; ++c) {
      orb.max_abs_lambda = std::max(orb.max_abs_lambda, max_lam[c]);
      hacc.add(hsum[c]);
    }
    orb.mean_height = hacc.total() / double(emitted);
    for (std::size_t f = 0; f < nf; ++f) {
      PairwiseAccumulator<C> acc;
      for (std::size_t c = 0; c < nchunks; ++c)
        if (!sums[c].empty()) acc.add(sums[c][f]);
      FunctionGap g;
      g.function_id = fns[f].id;
      g.empirical = acc.total() / double(emitted);
      g.canonical = canon[f].value;
      g.canonical_error = canon[f].error_estimate;
      g.gap = std::abs(g.empirical - g.canonical);
      if (g.gap >= orb.max_gap) {
        orb.max_gap = g.gap;
        orb.max_gap_function = g.function_id;
      }
      orb.gaps.push_back(std::move(g));
    }
    rep.heights_small = rep.heights_small && orb.max_abs_lambda <= cfg.height_bound;
    rep.decay.emplace_back(level, orb.max_gap);
    rep.orbits.push_back(std::move(orb));
  }
  for (std::size_t k = 1; k < rep.decay.size(); ++k)
    if (rep.decay[k].second > rep.decay[k - 1].second + cfg.decay_floor) rep.non_increasing = false;
  rep.final_max_gap = rep.decay.empty() ? 0.0 : rep.decay.back().second;
  rep.pass = rep.final_max_gap < cfg.gap_threshold && rep.heights_small && (!cfg.require_decay || rep.non_increasing);
  return rep;
}

elliptic::RationalPoint find_rational_division(const elliptic::CurveQ& E, const elliptic::RationalPoint& Q, int n,
                                              int precision_bits) {
  elliptic::require_on_curve(E, Q);
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be positive");
  if (n == 1) return Q;
  if (Q.infinity) return Q;
  const auto L = elliptic::periods<Real>(E, precision_bits);
  PrecisionGuard guard(precision_bits + 32);
  const Complex zQ = elliptic::elliptic_log(L, Q);
  const Real tol = ldexp(Real(1), -precision_bits / 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Complex z = (zQ + Real(i) * L.omega1 + Real(j) * L.omega2) / Real(n);
      cmath::upgrade(z);
      Complex x;
      try {
        x = elliptic::point_from_parameter(L, z).first;
      } catch (const Error&) {
        continue;
      }
      if (abs(x.imag()) > tol * (1 + cmath::abs(x))) continue;
      for (const Rational& r : convergents(x.real(), precision_bits / 3)) {
        if (abs(Real(x.real() - from_rational<Real>(r))) > tol * (1 + abs(x.real()))) continue;
        const auto y = rational_sqrt(r * r * r + E.a() * r + E.b());
        if (!y) continue;
        for (const Rational& yy : {*y, Rational(-*y)}) {
          const auto P = elliptic::RationalPoint::affine(r, yy);
          if (elliptic::mul(E, n, P) == Q) return P;
        }
      }
    }
  throw Error(ErrorKind::NoRationalDivision, fmt::format("no rational point P with {} P = Q found", n));
}

LadderHeightTable ladder_height_experiment(const elliptic::CurveQ& E, const elliptic::RationalPoint& Q,
                                           const std::vector<int>& n_list, int precision_bits) {
  LadderHeightTable tab;
  tab.note =
      "point-level check of the n^-2 scaling of the class height; the height of the compactified variety itself is "
      "not computed";
  const double hQ = elliptic::neron_tate(E, Q, precision_bits);
  for (int n : n_list) {
    LadderHeightRow row;
    row.n = n;
    row.divided = find_rational_division(E, Q, n);
    row.h_divided = elliptic::neron_tate(E, row.divided, precision_bits);
    row.n2_h_divided = double(n) * n * row.h_divided;
    row.h_class = hQ;
    row.residual = std::abs(row.h_divided - hQ / (double(n) * n));
    tab.rows.push_back(row);
  }
  return tab;
}

std::vector<GPoint> alpha_m(const GModel& m, std::span<const GPoint> points) {
  if (points.size() < 2) throw Error(ErrorKind::InvalidArgument, "alpha_m needs at least two points");
  for (const auto& p : points)
    if (p.model_tag != m.tag) throw Error(ErrorKind::ModelMismatch, "alpha_m points come from different models");
  std::vector<GPoint> out;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) out.push_back(semi::g_sub(m, points[i], points[i + 1]));
  return out;
}

}  // namespace semiab::equidist
