#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "semiab/elliptic/curve.hpp"
#include "semiab/measures.hpp"
#include "semiab/semiabelian.hpp"

namespace semiab::equidist {

using C = std::complex<double>;
using measures::Group;
using semi::GModel;
using semi::GPoint;
using semi::TorusCoords;

enum class OrbitKind { PrimitiveTorsion, FullTorsion, DivisionTower, CustomList };
std::string to_string(OrbitKind k);
OrbitKind orbit_kind_from_string(const std::string& s);

struct OrbitSpec {
  Group group = Group::G;
  OrbitKind kind = OrbitKind::PrimitiveTorsion;
  int N = 1;                   // torsion order
  TorusCoords x0;              // division tower base point
  int n = 2, depth = 1;        // towers solve [n^depth] y = x0
  std::vector<GPoint> custom;  // custom lists
  std::size_t cap = 1000000;   // OrbitTooLarge above this many points
  double subsample = 0;        // keep about this many points (0 = all), seeded Bernoulli thinning
  std::uint64_t seed = 1;
};

struct OrbitPoint {
  GPoint point;
  TorusCoords coords;
  double height = 0;  // archimedean fiber height |lambda_G|
};

// Number of points before thinning.
std::size_t orbit_size(const OrbitSpec& spec);
// True for the built-in torsion families; custom lists are "strictness unchecked".
bool strictness_certified(const OrbitSpec& spec);

// Visit the orbit in chunks of at most chunk_size points in a fixed order.
// The chunk index is passed along so callers can merge deterministically.
using ChunkVisitor = std::function<void(std::size_t chunk_index, std::span<const OrbitPoint>)>;
std::size_t for_each_chunk(const OrbitSpec& spec, const GModel& m, std::size_t chunk_size, const ChunkVisitor& visit,
                           int threads = 1);

std::vector<OrbitPoint> generate_orbit(const OrbitSpec& spec, const GModel& m);

C empirical_average(std::span<const OrbitPoint> orbit, const measures::TestFunction& f);

struct FunctionGap {
  std::string function_id;
  C empirical;
  C canonical;
  double gap = 0;
  double canonical_error = 0;
};

struct OrbitReport {
  std::string orbit_id;
  int N_or_n = 0;
  std::size_t size = 0;
  std::vector<FunctionGap> gaps;
  double max_gap = 0;
  std::string max_gap_function;
  double max_abs_lambda = 0;
  double mean_height = 0;
  bool strictness_checked = true;
  std::string assumption;
};

struct EquidistConfig {
  std::string name = "equidist";
  Group group = Group::G;
  OrbitKind kind = OrbitKind::PrimitiveTorsion;
  std::vector<int> levels{8, 16, 32};  // N for torsion, depth for towers
  int tower_n = 2;
  TorusCoords tower_base;
  std::vector<GPoint> custom;
  int character_bound = 3;
  std::vector<measures::TestFunction> functions;  // in addition to the character set
  measures::Strategy canonical{measures::Method::Auto, 16, 1 << 16, 1};
  std::size_t max_points = 1000000;
  double subsample = 0;
  std::uint64_t seed = 1;
  int threads = 1;
  double gap_threshold = 0.05;     // on the last orbit
  double height_bound = 1e-9;      // smallness of orbit points
  bool require_decay = true;       // non-increasing max gap across levels
  double decay_floor = 1e-12;      // roundoff allowance in the decay check
};

struct EquidistReport {
  std::string name;
  std::vector<OrbitReport> orbits;
  std::vector<std::pair<int, double>> decay;  // (level, max gap)
  bool non_increasing = true;
  bool heights_small = true;
  double final_max_gap = 0;
  bool pass = false;
  std::vector<std::string> notes;
};

EquidistReport run_equidist(const EquidistConfig& config, const GModel& m);

struct LadderHeightRow {
  int n;
  double h_divided;       // h(Q') with n Q' = Q
  double n2_h_divided;    // n^2 h(Q')
  double h_class;         // h(Q)
  double residual;        // |h(Q') - h(Q)/n^2|
  elliptic::RationalPoint divided;
};

struct LadderHeightTable {
  std::vector<LadderHeightRow> rows;
  std::string note;
};

// Q' in E(Q) with n Q' = Q, searched among the n^2 analytic n-th parts of Q.
elliptic::RationalPoint find_rational_division(const elliptic::CurveQ& E, const elliptic::RationalPoint& Q, int n,
                                              int precision_bits = 256);

LadderHeightTable ladder_height_experiment(const elliptic::CurveQ& E, const elliptic::RationalPoint& Q,
                                           const std::vector<int>& n_list, int precision_bits = kDefaultPrecisionBits);

// (x1 - x2, x2 - x3, ..., x_{m-1} - x_m)
std::vector<GPoint> alpha_m(const GModel& m, std::span<const GPoint> points);

}  // namespace semiab::equidist
