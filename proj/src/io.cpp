#include "semiab/io.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "semiab/error.hpp"
#include "semiab/hash.hpp"

namespace semiab::io {

namespace {

[[noreturn]] void config_error(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::Config, where + ": " + what);
}

bool is_int_text(std::string_view s) {
  std::size_t i = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

Integer parse_integer(std::string s) {
  if (!is_int_text(s)) throw Error(ErrorKind::Parse, "not an integer: '" + s + "'");
  const bool neg = s[0] == '-';
  if (s[0] == '+' || neg) s.erase(0, 1);
  // no leading zeros: GMP would read them as an octal prefix
  const auto nz = s.find_first_not_of('0');
  s = nz == std::string::npos ? "0" : s.substr(nz);
  return neg ? Integer(-Integer(s)) : Integer(s);
}

json yaml_to_json(const YAML::Node& n) {
  switch (n.Type()) {
    case YAML::NodeType::Undefined:
    case YAML::NodeType::Null: return nullptr;
    case YAML::NodeType::Sequence: {
      json a = json::array();
      for (const auto& e : n) a.push_back(yaml_to_json(e));
      return a;
    }
    case YAML::NodeType::Map: {
      json o = json::object();
      for (const auto& kv : n) o[kv.first.as<std::string>()] = yaml_to_json(kv.second);
      return o;
    }
    case YAML::NodeType::Scalar: break;
  }
  const std::string& s = n.Scalar();
  if (n.Tag() == "!") return s;  // quoted
  if (s == "true") return true;
  if (s == "false") return false;
  if (s == "null" || s == "~") return nullptr;
  if (is_int_text(s) && s.size() < 19) return std::stoll(s);
  char* end = nullptr;
  const double d = std::strtod(s.c_str(), &end);
  if (!s.empty() && end == s.c_str() + s.size()) return d;
  return s;
}

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!j.is_object()) config_error(where, "expected a table");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (auto a : allowed) ok = ok || it.key() == a;
    if (!ok) config_error(where, "unknown key '" + it.key() + "'");
  }
}

template <class T>
T get_as(const json& j, const std::string& where) {
  try {
    if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if (j.is_number_float()) {
        const double d = j.get<double>();
        if (d != std::floor(d) || std::abs(d) > 9e18) config_error(where, "expected an integer");
        if (std::is_unsigned_v<T> && d < 0) config_error(where, "expected a nonnegative integer");
        return static_cast<T>(d);
      }
      if (!j.is_number_integer()) config_error(where, "expected an integer");
      if (std::is_unsigned_v<T> && j.is_number_integer() && !j.is_number_unsigned() && j.get<long long>() < 0)
        config_error(where, "expected a nonnegative integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!j.is_number()) config_error(where, "expected a number");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!j.is_boolean()) config_error(where, "expected true or false");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!j.is_string()) config_error(where, "expected a string");
    }
    return j.get<T>();
  } catch (const json::exception& e) {
    config_error(where, e.what());
  }
}

template <class T>
T get_or(const json& j, const char* key, T def, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return def;
  return get_as<T>(j.at(key), where + "." + key);
}

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) config_error(where, std::string("missing key '") + key + "'");
  return j.at(key);
}

C complex_from_json(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) config_error(where, "expected [re, im]");
  return {get_as<double>(j[0], where + "[0]"), get_as<double>(j[1], where + "[1]")};
}

json complex_to_json(C z) { return json::array({z.real(), z.imag()}); }

void dump_rec(const json& j, int indent, int depth, std::string& out) {
  const auto pad = [&](int d) { return indent >= 0 ? "\n" + std::string(static_cast<std::size_t>(indent * d), ' ') : ""; };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += pad(depth + 1);
        out += json(it.key()).dump();
        out += indent >= 0 ? ": " : ":";
        dump_rec(it.value(), indent, depth + 1, out);
      }
      out += pad(depth);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        out += pad(depth + 1);
        dump_rec(j[i], indent, depth + 1, out);
      }
      out += pad(depth);
      out += ']';
      return;
    }
    case json::value_t::number_float: {
      const double x = j.get<double>();
      out += std::isfinite(x) ? fmt17(x) : "null";
      return;
    }
    default: out += j.dump();
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

json orbit_report_json(const equidist::OrbitReport& o) {
  json gaps = json::array();
  for (const auto& g : o.gaps)
    gaps.push_back({{"function_id", g.function_id},
                    {"empirical", complex_to_json(g.empirical)},
                    {"canonical", complex_to_json(g.canonical)},
                    {"canonical_error", g.canonical_error},
                    {"gap", g.gap}});
  return {{"orbit_id", o.orbit_id},
          {"N_or_n", o.N_or_n},
          {"size", o.size},
          {"max_gap", o.max_gap},
          {"max_gap_function", o.max_gap_function},
          {"max_abs_lambda", o.max_abs_lambda},
          {"mean_height", o.mean_height},
          {"strictness_checked", o.strictness_checked},
          {"assumption", o.assumption},
          {"gaps", gaps}};
}

}  // namespace

std::string fmt17(double x) { return fmt::format("{:.17g}", x); }

Rational parse_rational(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw Error(ErrorKind::Parse, "empty rational");
  if (const auto slash = s.find('/'); slash != std::string::npos) {
    const Integer p = parse_integer(s.substr(0, slash)), q = parse_integer(s.substr(slash + 1));
    if (q == 0) throw Error(ErrorKind::Parse, "zero denominator in '" + text + "'");
    return Rational(p, q);
  }
  if (is_int_text(s)) return Rational(parse_integer(s));
  // decimal with optional exponent
  std::size_t epos = s.find_first_of("eE");
  std::string mant = s.substr(0, epos);
  long exp10 = 0;
  if (epos != std::string::npos) {
    const std::string e = s.substr(epos + 1);
    if (!is_int_text(e) || e.size() > 6) throw Error(ErrorKind::Parse, "bad exponent in '" + text + "'");
    exp10 = std::stol(e);
  }
  const auto dot = mant.find('.');
  if (dot != std::string::npos) {
    exp10 -= static_cast<long>(mant.size() - dot - 1);
    mant.erase(dot, 1);
  }
  if (mant == "-" || mant == "+" || mant.empty()) throw Error(ErrorKind::Parse, "not a number: '" + text + "'");
  const Integer digits = parse_integer(mant);
  Integer scale = 1;
  for (long k = 0; k < std::labs(exp10); ++k) scale *= 10;
  return exp10 >= 0 ? Rational(digits * scale) : Rational(digits, scale);
}

Rational rational_from_json(const json& j) {
  if (j.is_number_integer()) return Rational(Integer(j.dump()));
  if (j.is_number_float()) return parse_rational(fmt17(j.get<double>()));
  if (j.is_string()) return parse_rational(j.get<std::string>());
  throw Error(ErrorKind::Parse, "expected a rational, got " + j.dump());
}

std::string rational_to_string(const Rational& q) { return q.str(); }

algnum::IntPoly poly_from_json(const json& j) {
  if (j.is_string()) return algnum::IntPoly::parse(j.get<std::string>());
  if (!j.is_array() || j.empty()) throw Error(ErrorKind::Parse, "polynomial must be text or a nonempty integer array");
  std::vector<Integer> c;
  for (const auto& e : j) {
    if (e.is_number_integer()) c.emplace_back(e.dump());
    else if (e.is_string()) c.push_back(parse_integer(e.get<std::string>()));
    else throw Error(ErrorKind::Parse, "polynomial coefficients must be integers");
  }
  return algnum::IntPoly(std::move(c));
}

elliptic::CurveQ curve_from_json(const json& j) {
  check_keys(j, {"a", "b"}, "curve");
  return elliptic::CurveQ(rational_from_json(require(j, "a", "curve")), rational_from_json(require(j, "b", "curve")));
}

json curve_to_json(const elliptic::CurveQ& E) {
  return {{"a", rational_to_string(E.a())}, {"b", rational_to_string(E.b())}};
}

elliptic::RationalPoint point_from_json(const json& j) {
  if (j.is_string() && j.get<std::string>() == "identity") return elliptic::RationalPoint::identity();
  check_keys(j, {"x", "y"}, "point");
  return elliptic::RationalPoint::affine(rational_from_json(require(j, "x", "point")),
                                         rational_from_json(require(j, "y", "point")));
}

json point_to_json(const elliptic::RationalPoint& P) {
  if (P.infinity) return "identity";
  return {{"x", rational_to_string(P.x)}, {"y", rational_to_string(P.y)}};
}

json model_to_json(const ModelSpec& m) {
  json u = m.point ? point_to_json(*m.point) : json{{"s", m.s}, {"t", m.t}};
  return {{"curve", curve_to_json(m.curve)}, {"u", u}, {"precision_bits", m.precision_bits}};
}

ModelSpec model_from_json(const json& j) {
  check_keys(j, {"curve", "u", "precision_bits"}, "model");
  ModelSpec m;
  m.curve = curve_from_json(require(j, "curve", "model"));
  const json& u = require(j, "u", "model");
  if (u.is_object() && (u.contains("s") || u.contains("t"))) {
    check_keys(u, {"s", "t"}, "model.u");
    m.s = get_as<double>(require(u, "s", "model.u"), "model.u.s");
    m.t = get_as<double>(require(u, "t", "model.u"), "model.u.t");
  } else {
    m.point = point_from_json(u);
    elliptic::require_on_curve(m.curve, *m.point);
  }
  m.precision_bits = get_or<int>(j, "precision_bits", kDefaultPrecisionBits, "model");
  if (m.precision_bits < 53) config_error("model.precision_bits", "must be at least 53");
  return m;
}

semi::GModel build_model(const ModelSpec& m) {
  if (m.point) return semi::build_extension(m.curve, *m.point, m.precision_bits);
  return semi::build_extension_coords(m.curve, m.s, m.t, m.precision_bits);
}

measures::TestFunction make_function(const FunctionSpec& f) {
  if (f.type == "character") return measures::character(f.m[0], f.m[1], f.m[2]);
  if (f.type == "fiber_abs_log") return measures::fiber_abs_log();
  if (f.type == "smooth_bump") return measures::smooth_bump(f.center, f.radius);
  throw Error(ErrorKind::Config, "unknown test function '" + f.type + "'");
}

json function_to_json(const FunctionSpec& f) {
  if (f.type == "character") return {{"type", f.type}, {"m", f.m}};
  if (f.type == "smooth_bump") return {{"type", f.type}, {"center", f.center}, {"radius", f.radius}};
  return {{"type", f.type}};
}

FunctionSpec function_from_json(const json& j) {
  FunctionSpec f;
  if (j.is_string()) {
    f.type = j.get<std::string>();
  } else {
    check_keys(j, {"type", "m", "center", "radius"}, "functions[]");
    f.type = get_as<std::string>(require(j, "type", "functions[]"), "functions[].type");
  }
  if (f.type == "character") {
    const json& m = require(j, "m", "character");
    if (!m.is_array() || m.size() != 3) config_error("character.m", "expected three integers");
    for (std::size_t i = 0; i < 3; ++i) f.m[i] = get_as<int>(m[i], "character.m");
  } else if (f.type == "smooth_bump") {
    const json& c = require(j, "center", "smooth_bump");
    if (!c.is_array() || c.size() != 3) config_error("smooth_bump.center", "expected [s, t, theta]");
    for (std::size_t i = 0; i < 3; ++i) f.center[i] = get_as<double>(c[i], "smooth_bump.center");
    f.radius = get_as<double>(require(j, "radius", "smooth_bump"), "smooth_bump.radius");
  } else if (f.type != "fiber_abs_log") {
    config_error("functions[].type", "unknown test function '" + f.type + "'");
  }
  make_function(f);  // validates parameters
  return f;
}

std::string to_string(measures::Method m) {
  switch (m) {
    case measures::Method::Auto: return "auto";
    case measures::Method::Tensor: return "tensor";
    case measures::Method::MonteCarlo: return "monte_carlo";
  }
  return "auto";
}

measures::Method method_from_string(const std::string& s) {
  if (s == "auto") return measures::Method::Auto;
  if (s == "tensor") return measures::Method::Tensor;
  if (s == "monte_carlo") return measures::Method::MonteCarlo;
  throw Error(ErrorKind::Config, "unknown canonical method '" + s + "' (auto, tensor, monte_carlo)");
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') j = json::parse(text);
    else j = yaml_to_json(YAML::Load(text));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("config: ") + e.what());
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::Parse, std::string("config: ") + e.what());
  }
  if (j.is_object() && j.contains("config") && j.contains("config_hash")) j = json(j.at("config"));
  check_keys(j, {"command", "name", "model", "orbit", "characters", "functions", "canonical", "thresholds", "seed",
                 "threads", "output"},
             "config");

  RunConfig c;
  auto& e = c.equidist;
  c.command = get_or<std::string>(j, "command", "equidist", "config");
  e.name = get_or<std::string>(j, "name", e.name, "config");
  c.model = model_from_json(require(j, "model", "config"));
  e.seed = get_or<std::uint64_t>(j, "seed", e.seed, "config");
  e.threads = get_or<int>(j, "threads", e.threads, "config");
  if (e.threads < 1) config_error("config.threads", "must be at least 1");

  if (j.contains("orbit")) {
    const json& o = j.at("orbit");
    check_keys(o, {"group", "kind", "levels", "max_points", "subsample", "tower", "custom"}, "orbit");
    e.group = measures::group_from_string(get_or<std::string>(o, "group", measures::to_string(e.group), "orbit"));
    e.kind = equidist::orbit_kind_from_string(get_or<std::string>(o, "kind", equidist::to_string(e.kind), "orbit"));
    if (o.contains("levels")) {
      const json& lv = o.at("levels");
      if (!lv.is_array() || lv.empty()) config_error("orbit.levels", "expected a nonempty list");
      e.levels.clear();
      for (const auto& l : lv) {
        e.levels.push_back(get_as<int>(l, "orbit.levels"));
        if (e.levels.back() < 1) config_error("orbit.levels", "levels must be positive");
      }
    }
    e.max_points = get_or<std::size_t>(o, "max_points", e.max_points, "orbit");
    e.subsample = get_or<double>(o, "subsample", e.subsample, "orbit");
    if (e.subsample < 0) config_error("orbit.subsample", "must be nonnegative");
    if (o.contains("tower")) {
      const json& t = o.at("tower");
      check_keys(t, {"n", "base"}, "orbit.tower");
      e.tower_n = get_or<int>(t, "n", e.tower_n, "orbit.tower");
      if (e.tower_n < 1) config_error("orbit.tower.n", "must be positive");
      if (t.contains("base")) {
        const json& b = t.at("base");
        check_keys(b, {"s", "t", "v"}, "orbit.tower.base");
        e.tower_base.s = get_or<double>(b, "s", 0.0, "orbit.tower.base");
        e.tower_base.t = get_or<double>(b, "t", 0.0, "orbit.tower.base");
        e.tower_base.v = b.contains("v") ? complex_from_json(b.at("v"), "orbit.tower.base.v") : C(1.0);
        if (e.tower_base.v == C(0.0)) config_error("orbit.tower.base.v", "fiber coordinate must be nonzero");
      }
    }
    if (o.contains("custom")) {
      for (const auto& p : o.at("custom")) {
        check_keys(p, {"z", "w"}, "orbit.custom[]");
        c.custom.emplace_back(complex_from_json(require(p, "z", "orbit.custom[]"), "orbit.custom[].z"),
                              complex_from_json(require(p, "w", "orbit.custom[]"), "orbit.custom[].w"));
      }
    }
  }
  if (j.contains("characters")) {
    check_keys(j.at("characters"), {"bound"}, "characters");
    e.character_bound = get_or<int>(j.at("characters"), "bound", e.character_bound, "characters");
    if (e.character_bound < 0) config_error("characters.bound", "must be nonnegative");
  }
  if (j.contains("functions")) {
    if (!j.at("functions").is_array()) config_error("functions", "expected a list");
    for (const auto& f : j.at("functions")) c.functions.push_back(function_from_json(f));
  }
  if (j.contains("canonical")) {
    const json& s = j.at("canonical");
    check_keys(s, {"method", "order", "samples", "seed"}, "canonical");
    e.canonical.method = method_from_string(get_or<std::string>(s, "method", to_string(e.canonical.method), "canonical"));
    e.canonical.order = get_or<int>(s, "order", e.canonical.order, "canonical");
    e.canonical.samples = get_or<std::size_t>(s, "samples", e.canonical.samples, "canonical");
    e.canonical.seed = get_or<std::uint64_t>(s, "seed", e.canonical.seed, "canonical");
  }
  if (j.contains("thresholds")) {
    const json& t = j.at("thresholds");
    check_keys(t, {"gap", "height", "require_decay", "decay_floor"}, "thresholds");
    e.gap_threshold = get_or<double>(t, "gap", e.gap_threshold, "thresholds");
    e.height_bound = get_or<double>(t, "height", e.height_bound, "thresholds");
    e.require_decay = get_or<bool>(t, "require_decay", e.require_decay, "thresholds");
    e.decay_floor = get_or<double>(t, "decay_floor", e.decay_floor, "thresholds");
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    check_keys(o, {"path", "format"}, "output");
    c.output.path = get_or<std::string>(o, "path", "", "output");
    c.output.format = get_or<std::string>(o, "format", "both", "output");
    if (c.output.format != "csv" && c.output.format != "json" && c.output.format != "both")
      config_error("output.format", "expected csv, json or both");
  }
  if (e.kind == equidist::OrbitKind::CustomList && c.custom.empty()) config_error("orbit.custom", "custom_list needs points");
  return c;
}

RunConfig load_config(const std::filesystem::path& path) { return parse_config(read_file(path)); }

json config_to_json(const RunConfig& c) {
  const auto& e = c.equidist;
  json custom = json::array();
  for (const auto& [z, w] : c.custom) custom.push_back({{"z", complex_to_json(z)}, {"w", complex_to_json(w)}});
  json fns = json::array();
  for (const auto& f : c.functions) fns.push_back(function_to_json(f));
  json orbit = {{"group", measures::to_string(e.group)},
                {"kind", equidist::to_string(e.kind)},
                {"levels", e.levels},
                {"max_points", e.max_points},
                {"subsample", e.subsample},
                {"tower",
                 {{"n", e.tower_n},
                  {"base", {{"s", e.tower_base.s}, {"t", e.tower_base.t}, {"v", complex_to_json(e.tower_base.v)}}}}}};
  if (!custom.empty()) orbit["custom"] = custom;
  return {{"command", c.command},
          {"name", e.name},
          {"model", model_to_json(c.model)},
          {"orbit", orbit},
          {"characters", {{"bound", e.character_bound}}},
          {"functions", fns},
          {"canonical",
           {{"method", to_string(e.canonical.method)},
            {"order", e.canonical.order},
            {"samples", e.canonical.samples},
            {"seed", e.canonical.seed}}},
          {"thresholds",
           {{"gap", e.gap_threshold},
            {"height", e.height_bound},
            {"require_decay", e.require_decay},
            {"decay_floor", e.decay_floor}}},
          {"seed", e.seed},
          {"threads", e.threads},
          {"output", {{"path", c.output.path}, {"format", c.output.format}}}};
}

std::string config_hash(const RunConfig& c) {
  json j = config_to_json(c);
  // neither affects the numbers
  j.erase("output");
  j.erase("threads");
  return fmt::format("{:016x}", fnv1a(dump(j, -1)));
}

equidist::EquidistConfig resolve(const RunConfig& c, const semi::GModel& m) {
  equidist::EquidistConfig e = c.equidist;
  e.functions.clear();
  for (const auto& f : c.functions) e.functions.push_back(make_function(f));
  e.custom.clear();
  for (const auto& [z, w] : c.custom) e.custom.push_back(semi::make_point(m, z, w));
  return e;
}

std::string dump(const json& j, int indent) {
  std::string out;
  dump_rec(j, indent, 0, out);
  return out;
}

std::string report_csv(const equidist::EquidistReport& rep) {
  std::string out = "orbit_id,N_or_n,size,function_id,empirical_re,empirical_im,canonical_re,canonical_im,gap,max_abs_lambda\n";
  for (const auto& o : rep.orbits)
    for (const auto& g : o.gaps)
      out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", csv_field(o.orbit_id), o.N_or_n, o.size,
                         csv_field(g.function_id), fmt17(g.empirical.real()), fmt17(g.empirical.imag()),
                         fmt17(g.canonical.real()), fmt17(g.canonical.imag()), fmt17(g.gap), fmt17(o.max_abs_lambda));
  return out;
}

json report_json(const equidist::EquidistReport& rep, const RunConfig& cfg) {
  json orbits = json::array();
  for (const auto& o : rep.orbits) orbits.push_back(orbit_report_json(o));
  json decay = json::array();
  for (const auto& [level, gap] : rep.decay) decay.push_back({{"level", level}, {"max_gap", gap}});
  json results = {{"name", rep.name},
                  {"pass", rep.pass},
                  {"non_increasing", rep.non_increasing},
                  {"heights_small", rep.heights_small},
                  {"final_max_gap", rep.final_max_gap},
                  {"decay", decay},
                  {"notes", rep.notes},
                  {"orbits", orbits}};
  json r = wrap_report("equidist", config_to_json(cfg), results);
  r["config_hash"] = config_hash(cfg);
  return r;
}

json wrap_report(const std::string& command, const json& config, const json& results) {
  return {{"command", command},
          {"config", config},
          {"config_hash", fmt::format("{:016x}", fnv1a(dump(config, -1)))},
          {"results", results}};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

}  // namespace semiab::io
