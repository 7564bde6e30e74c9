#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "semiab/error.hpp"

namespace semiab::dynamics {

// Height problem for a self-map f of degree d: the canonical height is the
// fixed point of h -> d^-1 h(f(.)). A nonzero cocycle_shift c rescales the
// isomorphism L^d -> f*L; the canonical object then satisfies
// h(f(x)) = d h(x) - c and moves by c / (d - 1).
template <class Point>
struct DynamicalHeightProblem {
  std::function<double(const Point&)> naive_height;
  std::function<Point(const Point&)> dynamics;
  int degree = 2;
  int max_iterations = 64;
  double tolerance = 1e-12;
  double cocycle_shift = 0.0;
};

struct TateLimitResult {
  double value = 0.0;
  int iterations = 0;
  // Bound from the largest observed defect |h(f(y)) - d h(y)| along the orbit.
  double error_bound = 0.0;
  double max_defect = 0.0;
  std::vector<double> estimates;
};

template <class Point>
TateLimitResult tate_limit(const DynamicalHeightProblem<Point>& problem, Point x) {
  const int d = problem.degree;
  if (d < 2) throw Error(ErrorKind::InvalidArgument, "dynamical degree must be >= 2");
  const double c_over = problem.cocycle_shift / static_cast<double>(d - 1);

  TateLimitResult result;
  double scale = 1.0;  // d^-k
  double previous_naive = problem.naive_height(x);
  if (!std::isfinite(previous_naive)) throw Error(ErrorKind::OverflowAtIterate, "naive height not finite at k = 0");
  result.estimates.push_back(previous_naive + c_over * (1.0 - scale));

  for (int k = 1; k <= problem.max_iterations; ++k) {
    x = problem.dynamics(x);
    const double naive = problem.naive_height(x);
    if (!std::isfinite(naive))
      throw Error(ErrorKind::OverflowAtIterate, "iterate " + std::to_string(k) + " left the representable range");
    result.max_defect = std::max(result.max_defect, std::fabs(naive - d * previous_naive));
    previous_naive = naive;
    scale /= d;
    result.estimates.push_back(naive * scale + c_over * (1.0 - scale));

    const std::size_t n = result.estimates.size();
    if (n >= 3) {
      const double diff1 = std::fabs(result.estimates[n - 1] - result.estimates[n - 2]);
      const double diff2 = std::fabs(result.estimates[n - 2] - result.estimates[n - 3]);
      if (diff1 < problem.tolerance && diff2 < problem.tolerance) {
        result.value = result.estimates.back();
        result.iterations = k;
        result.error_bound = result.max_defect * scale / static_cast<double>(d - 1);
        return result;
      }
    }
  }
  throw Error(ErrorKind::NoConvergence,
              "Tate limit did not converge within " + std::to_string(problem.max_iterations) + " iterations");
}

// Coordinates on a chart of the parameter domain.
struct ChartPoint {
  double a = 0.0;
  double b = 0.0;
};

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  int nodes = 2;
  // Periodic axes use uniform nodes on [lo, hi) and wrap; others use
  // Chebyshev-Lobatto nodes including both endpoints.
  bool periodic = false;
};

using PointMap = std::function<ChartPoint(const ChartPoint&)>;
using ChartFunction = std::function<double(const ChartPoint&)>;

// Metric potential -log||s|| sampled on a tensor grid over a rectangle of a
// chart, interpolated piecewise bilinearly.
class PotentialGrid {
 public:
  PotentialGrid(Axis a, Axis b, std::vector<double> values);

  static PotentialGrid sample(const Axis& a, const Axis& b, const ChartFunction& f);

  const Axis& axis_a() const { return a_; }
  const Axis& axis_b() const { return b_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& nodes_a() const { return nodes_a_; }
  const std::vector<double>& nodes_b() const { return nodes_b_; }
  std::size_t size() const { return values_.size(); }
  ChartPoint node(std::size_t i, std::size_t j) const { return {nodes_a_[i], nodes_b_[j]}; }
  double value(std::size_t i, std::size_t j) const { return values_[i * nodes_b_.size() + j]; }

  // Throws DomainEscape when p lies outside the chart rectangle.
  double interpolate(const ChartPoint& p) const;

  double sup_norm() const;
  double sup_distance(const PotentialGrid& other) const;
  double sup_distance(const ChartFunction& f) const;

 private:
  Axis a_, b_;
  std::vector<double> nodes_a_, nodes_b_;
  std::vector<double> values_;
};

// g_{j+1}(p) = (g_j(pullback(p)) + cocycle(p)) / d, evaluated at the grid nodes.
PotentialGrid canonical_potential_iterate(const PotentialGrid& g0, const PointMap& pullback, int d, int steps,
                                          const ChartFunction& cocycle = {});

// sup over nodes of |g(pullback(p)) + cocycle(p) - d g(p)|.
double isometry_residual(const PotentialGrid& g, const PointMap& pullback, int d,
                         const ChartFunction& cocycle = {});

struct ContractionHistory {
  std::vector<double> successive_sup_differences;
  // Ratios of consecutive entries above; 1/d when the pullback maps nodes
  // onto nodes.
  std::vector<double> measured_ratios;
  PotentialGrid final_grid;
};

ContractionHistory contraction_history(const PotentialGrid& g0, const PointMap& pullback, int d, int steps,
                                        const ChartFunction& cocycle = {});

}  // namespace semiab::dynamics
