#include "semiab/dynamic_metric.hpp"

#include <algorithm>
#include <numbers>

namespace semiab::dynamics {

namespace {

constexpr double kChartSlack = 1e-12;

std::vector<double> make_nodes(const Axis& axis) {
  if (axis.nodes < 1) throw Error(ErrorKind::InvalidArgument, "axis needs at least one node");
  if (!(axis.hi >= axis.lo)) throw Error(ErrorKind::InvalidArgument, "axis bounds reversed");
  std::vector<double> nodes(static_cast<std::size_t>(axis.nodes));
  if (axis.nodes == 1) {
    nodes[0] = axis.lo;
    return nodes;
  }
  const double width = axis.hi - axis.lo;
  for (int i = 0; i < axis.nodes; ++i) {
    if (axis.periodic) {
      nodes[static_cast<std::size_t>(i)] = axis.lo + width * i / axis.nodes;
    } else {
      const double c = std::cos(std::numbers::pi * i / (axis.nodes - 1));
      nodes[static_cast<std::size_t>(i)] = axis.lo + 0.5 * width * (1.0 - c);
    }
  }
  if (!axis.periodic) {
    nodes.front() = axis.lo;
    nodes.back() = axis.hi;
  }
  return nodes;
}

// Locate x on an axis: returns the lower node index and the weight of the
// upper neighbour (which wraps for periodic axes).
struct Bracket {
  std::size_t lower, upper;
  double weight;
};

Bracket locate(const Axis& axis, const std::vector<double>& nodes, double x) {
  const std::size_t n = nodes.size();
  if (n == 1) {
    if (std::fabs(x - axis.lo) > kChartSlack * std::max(1.0, std::fabs(axis.lo)))
      throw Error(ErrorKind::DomainEscape, "point leaves the degenerate chart axis");
    return {0, 0, 0.0};
  }
  if (axis.periodic) {
    const double width = axis.hi - axis.lo;
    double t = std::fmod(x - axis.lo, width);
    if (t < 0) t += width;
    const double pos = t / width * static_cast<double>(n);
    std::size_t lower = static_cast<std::size_t>(std::floor(pos));
    double weight = pos - static_cast<double>(lower);
    if (lower >= n) {
      lower = n - 1;
      weight = 1.0;
    }
    return {lower, (lower + 1) % n, weight};
  }
  const double slack = kChartSlack * std::max(1.0, axis.hi - axis.lo);
  if (x < axis.lo - slack || x > axis.hi + slack)
    throw Error(ErrorKind::DomainEscape, "pullback leaves the chart: coordinate " + std::to_string(x) +
                                             " outside [" + std::to_string(axis.lo) + ", " +
                                             std::to_string(axis.hi) + "]");
  x = std::clamp(x, axis.lo, axis.hi);
  auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
  std::size_t upper = static_cast<std::size_t>(it - nodes.begin());
  if (upper >= n) upper = n - 1;
  if (upper == 0) upper = 1;
  const std::size_t lower = upper - 1;
  const double span = nodes[upper] - nodes[lower];
  const double weight = span > 0 ? (x - nodes[lower]) / span : 0.0;
  return {lower, upper, weight};
}

}  // namespace

PotentialGrid::PotentialGrid(Axis a, Axis b, std::vector<double> values)
    : a_(a), b_(b), nodes_a_(make_nodes(a)), nodes_b_(make_nodes(b)), values_(std::move(values)) {
  if (values_.size() != nodes_a_.size() * nodes_b_.size())
    throw Error(ErrorKind::InvalidArgument, "grid value count does not match the axes");
  for (double v : values_)
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "potential grid values must be finite");
}

PotentialGrid PotentialGrid::sample(const Axis& a, const Axis& b, const ChartFunction& f) {
  const auto na = make_nodes(a), nb = make_nodes(b);
  std::vector<double> values;
  values.reserve(na.size() * nb.size());
  for (double x : na)
    for (double y : nb) values.push_back(f({x, y}));
  return PotentialGrid(a, b, std::move(values));
}

double PotentialGrid::interpolate(const ChartPoint& p) const {
  const Bracket ba = locate(a_, nodes_a_, p.a);
  const Bracket bb = locate(b_, nodes_b_, p.b);
  const double v00 = value(ba.lower, bb.lower), v01 = value(ba.lower, bb.upper);
  const double v10 = value(ba.upper, bb.lower), v11 = value(ba.upper, bb.upper);
  const double lo = v00 + bb.weight * (v01 - v00);
  const double hi = v10 + bb.weight * (v11 - v10);
  return lo + ba.weight * (hi - lo);
}

double PotentialGrid::sup_norm() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::fabs(v));
  return m;
}

double PotentialGrid::sup_distance(const PotentialGrid& other) const {
  if (other.values_.size() != values_.size()) throw Error(ErrorKind::InvalidArgument, "grid shapes differ");
  double m = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) m = std::max(m, std::fabs(values_[i] - other.values_[i]));
  return m;
}

double PotentialGrid::sup_distance(const ChartFunction& f) const {
  double m = 0.0;
  for (std::size_t i = 0; i < nodes_a_.size(); ++i)
    for (std::size_t j = 0; j < nodes_b_.size(); ++j) m = std::max(m, std::fabs(value(i, j) - f(node(i, j))));
  return m;
}

namespace {

PotentialGrid one_step(const PotentialGrid& g, const PointMap& pullback, int d, const ChartFunction& cocycle) {
  std::vector<double> next;
  next.reserve(g.size());
  for (std::size_t i = 0; i < g.nodes_a().size(); ++i)
    for (std::size_t j = 0; j < g.nodes_b().size(); ++j) {
      const ChartPoint p = g.node(i, j);
      double v = g.interpolate(pullback(p));
      if (cocycle) v += cocycle(p);
      next.push_back(v / d);
    }
  return PotentialGrid(g.axis_a(), g.axis_b(), std::move(next));
}

void check_degree(int d) {
  if (d < 2) throw Error(ErrorKind::InvalidArgument, "pullback degree must be >= 2");
}

}  // namespace

PotentialGrid canonical_potential_iterate(const PotentialGrid& g0, const PointMap& pullback, int d, int steps,
                                          const ChartFunction& cocycle) {
  check_degree(d);
  PotentialGrid g = g0;
  for (int k = 0; k < steps; ++k) g = one_step(g, pullback, d, cocycle);
  return g;
}

double isometry_residual(const PotentialGrid& g, const PointMap& pullback, int d, const ChartFunction& cocycle) {
  check_degree(d);
  double m = 0.0;
  for (std::size_t i = 0; i < g.nodes_a().size(); ++i)
    for (std::size_t j = 0; j < g.nodes_b().size(); ++j) {
      const ChartPoint p = g.node(i, j);
      double lhs = g.interpolate(pullback(p));
      if (cocycle) lhs += cocycle(p);
      m = std::max(m, std::fabs(lhs - d * g.value(i, j)));
    }
  return m;
}

ContractionHistory contraction_history(const PotentialGrid& g0, const PointMap& pullback, int d, int steps,
                                        const ChartFunction& cocycle) {
  check_degree(d);
  ContractionHistory history{{}, {}, g0};
  PotentialGrid g = g0;
  for (int k = 0; k < steps; ++k) {
    PotentialGrid next = one_step(g, pullback, d, cocycle);
    history.successive_sup_differences.push_back(next.sup_distance(g));
    g = std::move(next);
  }
  const auto& diffs = history.successive_sup_differences;
  for (std::size_t k = 1; k < diffs.size(); ++k)
    history.measured_ratios.push_back(diffs[k - 1] > 0 ? diffs[k] / diffs[k - 1] : 0.0);
  history.final_grid = std::move(g);
  return history;
}

}  // namespace semiab::dynamics
