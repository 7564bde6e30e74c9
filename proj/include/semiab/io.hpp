#pragma once

#include <array>
#include <complex>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "semiab/algnum.hpp"
#include "semiab/elliptic/curve.hpp"
#include "semiab/equidist.hpp"
#include "semiab/measures.hpp"
#include "semiab/semiabelian.hpp"

namespace semiab::io {

using json = nlohmann::json;
using C = std::complex<double>;

// 17 significant digits, shortest form kept diffable ("1", "0.10000000000000001").
std::string fmt17(double x);

// Integers, "p/q" and finite decimals ("0.25", "-1e-3") are accepted exactly.
Rational parse_rational(const std::string& text);
Rational rational_from_json(const json& j);
std::string rational_to_string(const Rational& q);

// Text form or JSON integer array with the constant term last.
algnum::IntPoly poly_from_json(const json& j);

struct ModelSpec {
  elliptic::CurveQ curve{Rational(-1), Rational(0)};
  // Either a rational point {x, y} or lattice coordinates {s, t}.
  std::optional<elliptic::RationalPoint> point;
  double s = 0, t = 0;
  int precision_bits = kDefaultPrecisionBits;
};

json model_to_json(const ModelSpec& m);
ModelSpec model_from_json(const json& j);
semi::GModel build_model(const ModelSpec& m);

elliptic::CurveQ curve_from_json(const json& j);
json curve_to_json(const elliptic::CurveQ& E);
elliptic::RationalPoint point_from_json(const json& j);
json point_to_json(const elliptic::RationalPoint& P);

struct FunctionSpec {
  std::string type = "character";  // character | fiber_abs_log | smooth_bump
  std::array<int, 3> m{0, 0, 0};
  std::array<double, 3> center{0, 0, 0};
  double radius = 0.25;
};

measures::TestFunction make_function(const FunctionSpec& f);
json function_to_json(const FunctionSpec& f);
FunctionSpec function_from_json(const json& j);

std::string to_string(measures::Method m);
measures::Method method_from_string(const std::string& s);

struct OutputSpec {
  std::string path;            // file prefix; the CLI falls back to the run name
  std::string format = "both"; // csv | json | both
};

struct RunConfig {
  std::string command = "equidist";
  ModelSpec model;
  // engine-side functions and custom stay empty; resolve() rebuilds them from the fields below.
  equidist::EquidistConfig equidist;
  std::vector<FunctionSpec> functions;
  std::vector<std::pair<C, C>> custom;  // (z, w)
  OutputSpec output;
};

// YAML or JSON text. A report from report_json is accepted as well:
// its embedded "config" object is used.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
json config_to_json(const RunConfig& cfg);
// FNV-1a of the canonical dump of config_to_json, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);
// The engine config with functions and custom points materialised on m.
equidist::EquidistConfig resolve(const RunConfig& cfg, const semi::GModel& m);

// JSON dump with every float printed by fmt17.
std::string dump(const json& j, int indent = 2);

std::string report_csv(const equidist::EquidistReport& rep);
json report_json(const equidist::EquidistReport& rep, const RunConfig& cfg);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

// Generic text reports for the other commands: {"command", "config", "config_hash", "results"}.
json wrap_report(const std::string& command, const json& config, const json& results);

}  // namespace semiab::io
