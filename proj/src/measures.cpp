#include "semiab/measures.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "semiab/error.hpp"
#include "semiab/summation.hpp"

namespace semiab::measures {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;
constexpr double kRoundoffFloor = 1e-13;

double circ_dist(double x) { return std::abs(x - std::round(x)); }

std::uint64_t splitmix(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

struct Moments {
  C mean;
  double stderr_ = 0;
  double sup = 0;
};

// Mean of f over the tensor grid with `order` nodes on every active axis.
template <class F>
Moments tensor_mean(const F& f, Group g, int order) {
  const int ns = g == Group::Gm ? 1 : order;
  const int nth = g == Group::E ? 1 : order;
  PairwiseAccumulator<C> acc;
  double sup = 0;
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < ns; ++j)
      for (int k = 0; k < nth; ++k) {
        TorusCoords c;
        c.s = double(i) / ns;
        c.t = double(j) / ns;
        c.v = std::polar(1.0, kTwoPi * k / nth);
        const C val = f(c);
        sup = std::max(sup, std::abs(val));
        acc.add(val);
      }
  return {acc.total() / double(acc.count()), 0, sup};
}

template <class F>
Moments mc_mean(const F& f, Group g, std::size_t samples, std::uint64_t seed) {
  std::uint64_t state = seed;
  auto unit = [&] { return double(splitmix(state) >> 11) * 0x1.0p-53; };
  PairwiseAccumulator<C> acc;
  PairwiseAccumulator<double> sq;
  std::vector<C> vals;
  vals.reserve(samples);
  for (std::size_t n = 0; n < samples; ++n) {
    TorusCoords c;
    c.s = g == Group::Gm ? 0.0 : unit();
    c.t = g == Group::Gm ? 0.0 : unit();
    c.v = g == Group::E ? C(1.0) : std::polar(1.0, kTwoPi * unit());
    vals.push_back(f(c));
    acc.add(vals.back());
  }
  const C mean = acc.total() / double(samples);
  double sup = 0;
  for (const C& v : vals) {
    sq.add(std::norm(v - mean));
    sup = std::max(sup, std::abs(v));
  }
  const double var = samples > 1 ? sq.total() / double(samples - 1) : 0.0;
  return {mean, std::sqrt(var / double(samples)), sup};
}

template <class F>
IntegralResult integrate(const F& f, Smoothness smooth, Group g, const Strategy& s) {
  Method m = s.method;
  if (m == Method::Auto) m = smooth == Smoothness::Smooth ? Method::Tensor : Method::MonteCarlo;
  IntegralResult r;
  r.method = m;
  if (m == Method::Tensor) {
    if (s.order < 2) throw Error(ErrorKind::InvalidArgument, "quadrature order must be at least 2");
    const Moments fine = tensor_mean(f, g, s.order);
    const Moments coarse = tensor_mean(f, g, std::max(1, s.order / 2));
    r.value = fine.mean;
    r.error_estimate = std::max(std::abs(fine.mean - coarse.mean), kRoundoffFloor * std::max(1.0, fine.sup));
    const std::size_t ax = static_cast<std::size_t>(s.order);
    r.nodes = g == Group::G ? ax * ax * ax : g == Group::E ? ax * ax : ax;
  } else {
    if (s.samples < 2) throw Error(ErrorKind::InvalidArgument, "Monte Carlo needs at least 2 samples");
    const Moments mc = mc_mean(f, g, s.samples, s.seed);
    r.value = mc.mean;
    r.error_estimate = mc.stderr_;
    r.nodes = s.samples;
  }
  return r;
}

}  // namespace

std::string to_string(Group g) {
  switch (g) {
    case Group::Gm: return "Gm";
    case Group::E: return "E";
    case Group::G: return "G";
  }
  return "G";
}

Group group_from_string(const std::string& s) {
  if (s == "Gm") return Group::Gm;
  if (s == "E") return Group::E;
  if (s == "G") return Group::G;
  throw Error(ErrorKind::Config, "unknown group '" + s + "' (expected Gm, E or G)");
}

TestFunction character(int m1, int m2, int m3) {
  TestFunction f;
  f.id = "character(" + std::to_string(m1) + "," + std::to_string(m2) + "," + std::to_string(m3) + ")";
  f.character = std::array<int, 3>{m1, m2, m3};
  f.eval = [m1, m2, m3](const TorusCoords& c) {
    const C v = c.v / std::abs(c.v);
    return std::polar(1.0, kTwoPi * (m1 * c.s + m2 * c.t)) * std::pow(v, m3);
  };
  return f;
}

TestFunction fiber_abs_log() {
  TestFunction f;
  f.id = "fiber_abs_log";
  f.smoothness = Smoothness::Continuous;
  f.eval = [](const TorusCoords& c) { return C(std::abs(std::log(std::abs(c.v)))); };
  return f;
}

TestFunction smooth_bump(std::array<double, 3> center, double radius) {
  if (!(radius > 0)) throw Error(ErrorKind::InvalidArgument, "bump radius must be positive");
  TestFunction f;
  f.id = fmt::format("smooth_bump({},{},{};{})", center[0], center[1], center[2], radius);
  f.eval = [center, radius](const TorusCoords& c) {
    const double th = std::arg(c.v) / kTwoPi;
    const double ds = circ_dist(c.s - center[0]), dt = circ_dist(c.t - center[1]);
    const double dth = circ_dist(th - center[2] / kTwoPi);
    const double r2 = (ds * ds + dt * dt + dth * dth) / (radius * radius);
    return r2 < 1 ? C(std::exp(1.0 - 1.0 / (1.0 - r2))) : C(0.0);
  };
  return f;
}

std::vector<std::array<int, 3>> character_set(int bound, Group g) {
  std::vector<std::array<int, 3>> out;
  const int sb = g == Group::Gm ? 0 : bound;
  const int vb = g == Group::E ? 0 : bound;
  for (int a = -sb; a <= sb; ++a)
    for (int b = -sb; b <= sb; ++b)
      for (int c = -vb; c <= vb; ++c)
        if (a || b || c) out.push_back({a, b, c});
  return out;
}

C s1_haar_integral(const std::function<C(C)>& f, int order) {
  if (order < 1) throw Error(ErrorKind::InvalidArgument, "quadrature order must be positive");
  std::vector<C> vals(static_cast<std::size_t>(order));
  for (int k = 0; k < order; ++k) vals[static_cast<std::size_t>(k)] = f(std::polar(1.0, kTwoPi * k / order));
  return pairwise_sum(std::span<const C>(vals)) * (2.0 / order);
}

double p1_canonical_mass(int order) {
  return s1_haar_integral([](C) { return C(1.0); }, order).real();
}

IntegralResult g_canonical_integral(const TestFunction& f, const GModel&, const Strategy& s, Group g) {
  return integrate(f.eval, f.smoothness, g, s);
}

double character_integral(const std::array<int, 3>& m) { return m[0] == 0 && m[1] == 0 && m[2] == 0 ? 1.0 : 0.0; }

double pushforward_projection_check(int n, const std::function<C(C)>& f, int order) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be positive");
  // f(z^n) carries n times the bandwidth of f
  const C lhs = s1_haar_integral([&](C z) { return f(std::pow(z, n)); }, order * n);
  return std::abs(lhs - s1_haar_integral(f, order));
}

std::vector<LadderMeasureRow> ladder_measure_check(const GModel& base, const std::vector<semi::LadderLevel>& levels,
                                                   const TestFunction& f, const Strategy& s) {
  std::vector<LadderMeasureRow> rows;
  const IntegralResult rhs = integrate(f.eval, f.smoothness, Group::G, s);
  for (const auto& lv : levels) {
    auto pulled = [&](const TorusCoords& c) {
      const semi::GPoint p = semi::from_coords(lv.model, c);
      return f.eval(semi::coords(base, semi::phi_n(base, lv, p)));
    };
    Strategy sl = s;
    sl.seed = s.seed + 0x9e37u * static_cast<std::uint64_t>(lv.n);
    const IntegralResult lhs = integrate(pulled, f.smoothness, Group::G, sl);
    LadderMeasureRow row;
    row.n = lv.n;
    row.pulled_back = lhs.value;
    row.base = rhs.value;
    row.residual = std::abs(lhs.value - rhs.value);
    row.error_estimate = lhs.method == Method::MonteCarlo ? std::hypot(lhs.error_estimate, rhs.error_estimate)
                                                          : lhs.error_estimate + rhs.error_estimate;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace semiab::measures
