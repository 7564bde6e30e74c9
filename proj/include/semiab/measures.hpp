#pragma once

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "semiab/semiabelian.hpp"

namespace semiab::measures {

using C = std::complex<double>;
using semi::GModel;
using semi::TorusCoords;

enum class Group { Gm, E, G };

// Which factors of the maximal compact (R/Z)^2 x S^1 a measure lives on:
// Gm is the circle over the identity, E the real 2-torus with v = 1.
std::string to_string(Group g);
Group group_from_string(const std::string& s);

enum class Smoothness { Smooth, Continuous };

struct TestFunction {
  std::string id;
  std::function<C(const TorusCoords&)> eval;
  Smoothness smoothness = Smoothness::Smooth;
  std::optional<std::array<int, 3>> character;
};

// e^{2 pi i (m1 s + m2 t)} (v/|v|)^m3
TestFunction character(int m1, int m2, int m3);
// |log|v||, which is |lambda_G| in torus coordinates.
TestFunction fiber_abs_log();
// C^infinity bump of the periodic distance to (s0, t0, theta0/2pi).
TestFunction smooth_bump(std::array<double, 3> center, double radius);
// All characters with max |m_i| <= bound except the trivial one, in lexicographic order.
std::vector<std::array<int, 3>> character_set(int bound, Group g = Group::G);

enum class Method { Auto, Tensor, MonteCarlo };

struct Strategy {
  Method method = Method::Auto;
  int order = 64;                 // trapezoid nodes per circle factor
  std::size_t samples = 1 << 16;  // Monte Carlo
  std::uint64_t seed = 1;
};

struct IntegralResult {
  C value;
  double error_estimate = 0;
  std::size_t nodes = 0;
  Method method = Method::Tensor;
};

struct CanonicalMeasure {
  Group group = Group::G;
  double normalization = 1;  // raw mass of the unnormalised measure; comparison integrals have mass 1
  Strategy strategy;
};

// (1/pi) int_0^{2 pi} f(e^{i phi}) d phi, trapezoid rule with `order` nodes.
C s1_haar_integral(const std::function<C(C)>& f, int order = 64);
double p1_canonical_mass(int order = 64);

// Normalised Haar integral over the maximal compact of the chosen group.
IntegralResult g_canonical_integral(const TestFunction& f, const GModel& m, const Strategy& s = {},
                                    Group g = Group::G);
// Closed form for characters: 1 for the trivial character, else 0.
double character_integral(const std::array<int, 3>& m);

// |int f(z^n) dHaar - int f dHaar| on S^1.
double pushforward_projection_check(int n, const std::function<C(C)>& f, int order = 64);

struct LadderMeasureRow {
  int n;
  C pulled_back;  // int (f o phi_n) d mu_{G_n}
  C base;         // int f d mu_G
  double residual;
  double error_estimate;
};

std::vector<LadderMeasureRow> ladder_measure_check(const GModel& base, const std::vector<semi::LadderLevel>& levels,
                                                   const TestFunction& f, const Strategy& s = {});

}  // namespace semiab::measures
