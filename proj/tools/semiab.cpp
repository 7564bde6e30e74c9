#include <cmath>
#include <exception>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "semiab/algnum.hpp"
#include "semiab/elliptic/height.hpp"
#include "semiab/equidist.hpp"
#include "semiab/error.hpp"
#include "semiab/io.hpp"
#include "semiab/measures.hpp"
#include "semiab/semiabelian.hpp"

using namespace semiab;
using io::json;

namespace {

constexpr int kExitPass = 0, kExitError = 1, kExitThreshold = 2;

struct Common {
  int precision_bits = kDefaultPrecisionBits;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out;
  std::string format = "json";
  double threshold = -1;  // < 0: command default
};

void add_common(CLI::App* app, Common& c, const std::string& threshold_help) {
  app->add_option("--precision-bits", c.precision_bits, "MPFR working precision in bits")->capture_default_str();
  app->add_option("--seed", c.seed, "seed for sampled points")->capture_default_str();
  app->add_option("--threads", c.threads, "worker threads (results do not depend on it)")->capture_default_str();
  app->add_option("--out", c.out, "output file (prefix for equidist); stdout only when empty");
  app->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app->add_option("--threshold", c.threshold, threshold_help);
}

std::vector<std::string> split(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);) out.push_back(item);
  return out;
}

elliptic::CurveQ parse_curve(const std::string& s) {
  const auto p = split(s);
  if (p.size() != 2) throw Error(ErrorKind::Parse, "--curve expects 'a,b'");
  return elliptic::CurveQ(io::parse_rational(p[0]), io::parse_rational(p[1]));
}

elliptic::RationalPoint parse_point(const std::string& s) {
  if (s == "identity") return elliptic::RationalPoint::identity();
  const auto p = split(s);
  if (p.size() != 2) throw Error(ErrorKind::Parse, "--point expects 'x,y' or 'identity'");
  return elliptic::RationalPoint::affine(io::parse_rational(p[0]), io::parse_rational(p[1]));
}

std::vector<double> parse_doubles(const std::string& s, std::size_t count, const char* what) {
  std::vector<double> v;
  for (const auto& t : split(s)) {
    std::size_t used = 0;
    double x = 0;
    try {
      x = std::stod(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != t.size()) throw Error(ErrorKind::Parse, std::string(what) + ": bad number '" + t + "'");
    v.push_back(x);
  }
  if (v.size() != count) throw Error(ErrorKind::Parse, fmt::format("{} expects {} comma-separated numbers", what, count));
  return v;
}

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> v;
  for (const auto& t : split(s)) {
    std::size_t used = 0;
    int x = 0;
    try {
      x = std::stoi(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != t.size()) throw Error(ErrorKind::Parse, "bad integer '" + t + "'");
    v.push_back(x);
  }
  return v;
}

// Flattens the results object into key,value rows.
void flatten(const json& j, const std::string& prefix, std::string& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], fmt::format("{}[{}]", prefix, i), out);
  } else {
    std::string v = io::dump(j, -1);
    if (j.is_string()) v = j.get<std::string>();
    if (v.find_first_of(",\"") != std::string::npos) {
      std::string q = "\"";
      for (char c : v) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      v = q + "\"";
    }
    out += prefix + "," + v + "\n";
  }
}

void emit(const Common& c, const json& report) {
  std::string text;
  if (c.format == "csv") {
    text = "key,value\n";
    flatten(json{{"command", report.at("command")}, {"config_hash", report.at("config_hash")}}, "", text);
    flatten(report.at("results"), "", text);
  } else {
    text = io::dump(report) + "\n";
  }
  std::cout << text;
  if (!c.out.empty()) io::write_file(c.out, text);
}

json common_json(const Common& c) {
  return {{"precision_bits", c.precision_bits}, {"seed", c.seed}, {"threads", c.threads}, {"threshold", c.threshold}};
}

semi::GModel model_from_args(const std::string& model_file, const std::string& curve, const std::string& point,
                             const std::string& coords, int bits, json& desc) {
  io::ModelSpec spec;
  if (!model_file.empty()) {
    const std::string text = io::read_file(model_file);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
      json j = json::parse(text);
      if (j.contains("config") && j.at("config").contains("model")) j = j["config"]["model"];
      else if (j.contains("model")) j = j["model"];
      spec = io::model_from_json(j);
    } else {
      spec = io::parse_config(text).model;
    }
  } else {
    if (curve.empty()) throw Error(ErrorKind::Config, "either --model or --curve is required");
    spec.curve = parse_curve(curve);
    if (!point.empty()) {
      spec.point = parse_point(point);
      elliptic::require_on_curve(spec.curve, *spec.point);
    } else if (!coords.empty()) {
      const auto st = parse_doubles(coords, 2, "--coords");
      spec.s = st[0];
      spec.t = st[1];
    }
    spec.precision_bits = bits;
  }
  desc = io::model_to_json(spec);
  return io::build_model(spec);
}

// ---- height ----

struct HeightArgs {
  std::string curve, point, poly, model, gpoint;
  int root = 0;
};

int cmd_height(const Common& c, const HeightArgs& a) {
  json res = json::object(), cfg = common_json(c);
  cfg["curve"] = a.curve;
  cfg["point"] = a.point;
  cfg["poly"] = a.poly;
  cfg["root"] = a.root;
  cfg["model"] = a.model;
  cfg["gpoint"] = a.gpoint;
  if (a.poly.empty() && a.point.empty() && a.gpoint.empty())
    throw Error(ErrorKind::Config, "height needs --poly, --point (with --curve) or --gpoint (with --model)");
  if (!a.poly.empty()) {
    const algnum::IntPoly p = algnum::IntPoly::parse(a.poly);
    const algnum::AlgebraicNumber alpha(p, a.root, c.precision_bits);
    res["algebraic"] = {{"min_poly", p.to_string()},
                        {"embedding", a.root},
                        {"value", {alpha.value_double().real(), alpha.value_double().imag()}},
                        {"weil_height", algnum::weil_height(alpha)},
                        {"toric_canonical_height", algnum::toric_canonical_height(alpha)},
                        {"fiber0_canonical_height", semi::canonical_height_fiber0(alpha)},
                        {"normalization", "absolute logarithmic Weil height (1/d) log M(f); toric height h(a) + h(1/a)"}};
  }
  if (!a.point.empty()) {
    if (a.curve.empty()) throw Error(ErrorKind::Config, "--point needs --curve");
    const auto E = parse_curve(a.curve);
    const auto P = parse_point(a.point);
    elliptic::require_on_curve(E, P);
    const int order = elliptic::torsion_order(E, P);
    const double h = elliptic::neron_tate(E, P, c.precision_bits);
    const double h2 = elliptic::neron_tate(E, elliptic::double_point(E, P), c.precision_bits);
    res["elliptic"] = {{"curve", io::curve_to_json(E)},
                       {"point", io::point_to_json(P)},
                       {"torsion_order", order},
                       {"naive_height", elliptic::naive_height(P)},
                       {"neron_tate", h},
                       {"neron_tate_2P", h2},
                       {"ratio_2P_over_P", h > 0 ? json(h2 / h) : json(nullptr)},
                       {"normalization", "lim 4^-k (1/2) log max(|num|, |den|) of x([2^k]P); half the regulator convention"}};
  }
  if (!a.gpoint.empty()) {
    json desc;
    const auto m = model_from_args(a.model, a.curve, "", "0,0", c.precision_bits, desc);
    const auto v = parse_doubles(a.gpoint, 4, "--gpoint");
    const auto p = semi::make_point(m, {v[0], v[1]}, {v[2], v[3]});
    res["semiabelian"] = {{"model", desc},
                          {"weil_lambda", semi::weil_lambda(m, p)},
                          {"archimedean_fiber_height", semi::archimedean_fiber_height(m, p)},
                          {"normalization", "lambda_G(z, w) = log|w| - Re(eta_hat(z) u), invariant under the lattice"}};
  }
  emit(c, io::wrap_report("height", cfg, res));
  return kExitPass;
}

// ---- equidist ----

int cmd_equidist(const Common& c, const std::string& config_path, bool seed_set, bool threads_set, bool bits_set,
                 bool format_set) {
  io::RunConfig cfg = io::load_config(config_path);
  if (seed_set) cfg.equidist.seed = c.seed;
  if (threads_set) cfg.equidist.threads = c.threads;
  if (bits_set) cfg.model.precision_bits = c.precision_bits;
  if (c.threshold >= 0) cfg.equidist.gap_threshold = c.threshold;
  if (!c.out.empty()) cfg.output.path = c.out;
  if (format_set) cfg.output.format = c.format;
  if (cfg.output.path.empty()) cfg.output.path = cfg.equidist.name;

  const auto model = io::build_model(cfg.model);
  const auto rep = equidist::run_equidist(io::resolve(cfg, model), model);
  if (cfg.output.format != "json") io::write_file(cfg.output.path + ".csv", io::report_csv(rep));
  if (cfg.output.format != "csv") io::write_file(cfg.output.path + ".json", io::dump(io::report_json(rep, cfg)) + "\n");

  std::cout << fmt::format("{} config_hash={}\n", rep.name, io::config_hash(cfg));
  for (const auto& o : rep.orbits)
    std::cout << fmt::format("  {} size={} max_gap={} ({}) max|lambda|={}\n", o.orbit_id, o.size, io::fmt17(o.max_gap),
                             o.max_gap_function, io::fmt17(o.max_abs_lambda));
  std::cout << fmt::format("final_max_gap={} threshold={} non_increasing={} heights_small={} -> {}\n",
                           io::fmt17(rep.final_max_gap), io::fmt17(cfg.equidist.gap_threshold), rep.non_increasing,
                           rep.heights_small, rep.pass ? "PASS" : "FAIL");
  return rep.pass ? kExitPass : kExitThreshold;
}

// ---- isogeny-check ----

struct IsogenyArgs {
  std::string model, curve, point, coords, n_list = "1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16";
  std::size_t samples = 256;
  long branch_a = 0, branch_b = 0;
};

int cmd_isogeny_check(const Common& c, const IsogenyArgs& a) {
  const double thr = c.threshold >= 0 ? c.threshold : 1e-10;
  json desc;
  const auto base = model_from_args(a.model, a.curve, a.point, a.coords, c.precision_bits, desc);
  const auto ns = parse_ints(a.n_list);
  json cfg = common_json(c);
  cfg["model"] = desc;
  cfg["n_list"] = ns;
  cfg["samples"] = a.samples;
  cfg["branch"] = {a.branch_a, a.branch_b};
  cfg["threshold"] = thr;

  bool ok = true;
  json rows = json::array();
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> radial(0.0, 1.0);
  for (int n : ns) {
    const auto lv = semi::ladder_level(base, n, a.branch_a, a.branch_b);
    double lam = 0;
    for (const auto& p : semi::max_compact_sample(a.samples, lv.model, c.seed + static_cast<std::uint64_t>(n))) {
      const auto q = semi::make_point(lv.model, p.z, p.w * std::exp(radial(rng)));
      lam = std::max(lam, std::abs(semi::ladder_lambda_residual(base, lv, q)));
    }
    const auto ker = semi::ladder_kernel(lv);
    std::size_t distinct = 0;
    bool maps_to_identity = true;
    for (std::size_t i = 0; i < ker.size(); ++i) {
      bool fresh = true;
      for (std::size_t k = 0; k < i; ++k) fresh = fresh && !semi::same_point(lv.model, ker[i], ker[k]);
      distinct += fresh;
      maps_to_identity = maps_to_identity && semi::same_point(base, semi::phi_n(base, lv, ker[i]), semi::identity(base));
    }
    const bool row_ok = lam < thr && distinct == static_cast<std::size_t>(n) && maps_to_identity;
    ok = ok && row_ok;
    rows.push_back({{"n", n},
                    {"lambda_residual", lam},
                    {"cocycle_residual", semi::ladder_cocycle_residual(base, lv)},
                    {"kernel_count", distinct},
                    {"kernel_maps_to_identity", maps_to_identity},
                    {"pass", row_ok}});
  }
  json res = {{"levels", rows}, {"pass", ok}};
  if (base.class_point) {
    json table = json::array();
    for (int n : ns) {
      try {
        const auto t = equidist::ladder_height_experiment(base.curve, *base.class_point, {n}, c.precision_bits);
        const auto& r = t.rows.at(0);
        table.push_back({{"n", n},
                         {"h_divided", r.h_divided},
                         {"n2_h_divided", r.n2_h_divided},
                         {"h_class", r.h_class},
                         {"residual", r.residual},
                         {"divided", io::point_to_json(r.divided)}});
        res["ladder_note"] = t.note;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoRationalDivision) throw;
        table.push_back({{"n", n}, {"divided", nullptr}, {"note", "no rational n-th part of the class point"}});
      }
    }
    res["ladder_heights"] = table;
  }
  emit(c, io::wrap_report("isogeny-check", cfg, res));
  return ok ? kExitPass : kExitThreshold;
}

// ---- measure-check ----

int cmd_measure_check(const Common& c, int order) {
  using measures::C;
  const double thr = c.threshold >= 0 ? c.threshold : 1e-12;
  json cfg = common_json(c);
  cfg["order"] = order;
  cfg["threshold"] = thr;

  const double mass = measures::p1_canonical_mass(order);
  double s1_char = 0;
  for (int m = -3; m <= 3; ++m)
    if (m) s1_char = std::max(s1_char, std::abs(measures::s1_haar_integral([m](C z) { return std::pow(z, m); }, order)));
  const double re2 = measures::s1_haar_integral([](C z) { return C(z.real() * z.real()); }, order).real();

  const auto m = semi::build_extension_coords(elliptic::CurveQ(Rational(-1), Rational(0)), 0.25, 0.5, c.precision_bits);
  measures::Strategy s;
  s.method = measures::Method::Tensor;
  s.order = 12;
  double g_char = 0;
  const auto chars = measures::character_set(3);
  for (const auto& ch : chars)
    g_char = std::max(g_char, std::abs(measures::g_canonical_integral(measures::character(ch[0], ch[1], ch[2]), m, s).value));

  json proj = json::array();
  double proj_max = 0;
  for (int n = 1; n <= 8; ++n) {
    double r = measures::pushforward_projection_check(n, [](C z) { return C(std::exp(z.real())); }, order);
    for (int k = -3; k <= 3; ++k)
      r = std::max(r, measures::pushforward_projection_check(n, [k](C z) { return std::pow(z, k); }, order));
    proj_max = std::max(proj_max, r);
    proj.push_back({{"n", n}, {"residual", r}});
  }
  const double mass_res = std::abs(mass - 2.0), re2_res = std::abs(re2 - 1.0);
  const bool ok = mass_res < thr && s1_char < thr && re2_res < thr && g_char < thr && proj_max < thr;
  json res = {{"s1_mass", mass},
              {"s1_mass_residual", mass_res},
              {"s1_max_character", s1_char},
              {"s1_re_z_squared", re2},
              {"g_characters", chars.size()},
              {"g_max_character", g_char},
              {"projection", proj},
              {"projection_max", proj_max},
              {"pass", ok}};
  emit(c, io::wrap_report("measure-check", cfg, res));
  return ok ? kExitPass : kExitThreshold;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heights, Weil functions and equidistribution on extensions of elliptic curves by Gm"};
  app.require_subcommand(1);

  Common hc, ec, ic, mc;
  HeightArgs ha;
  auto* height = app.add_subcommand("height", "Weil, toric, Neron-Tate and fiber heights");
  add_common(height, hc, "unused");
  height->add_option("--poly", ha.poly, "minimal polynomial of an algebraic number, e.g. 'x^2 - 2'");
  height->add_option("--root", ha.root, "embedding index of the root")->capture_default_str();
  height->add_option("--curve", ha.curve, "short Weierstrass coefficients 'a,b'");
  height->add_option("--point", ha.point, "rational point 'x,y' or 'identity'");
  height->add_option("--model", ha.model, "model file (JSON or YAML) for --gpoint");
  height->add_option("--gpoint", ha.gpoint, "point of G as 'Re z,Im z,Re w,Im w'");

  std::string config_path;
  auto* eq = app.add_subcommand("equidist", "Run an equidistribution experiment; writes <out>.csv and <out>.json");
  add_common(eq, ec, "gap threshold on the last level (config default 0.05)");
  eq->add_option("config", config_path, "experiment config (YAML, JSON or a previous JSON report)")->required();

  IsogenyArgs ia;
  auto* iso = app.add_subcommand("isogeny-check", "Weil-function scaling, kernel counts and n^-2 heights along the ladder");
  add_common(iso, ic, "lambda residual threshold (default 1e-10)");
  iso->add_option("--model", ia.model, "model file");
  iso->add_option("--curve", ia.curve, "short Weierstrass coefficients 'a,b'");
  iso->add_option("--point", ia.point, "extension class as a rational point 'x,y'");
  iso->add_option("--coords", ia.coords, "extension class as lattice coordinates 's,t'");
  iso->add_option("--n-list", ia.n_list, "comma-separated ladder levels")->capture_default_str();
  iso->add_option("--samples", ia.samples, "sampled points per level")->capture_default_str();
  iso->add_option("--branch", ia.branch_a, "lattice branch a of lambda_b = a w1 + b w2")->capture_default_str();
  iso->add_option("--branch-b", ia.branch_b, "lattice branch b")->capture_default_str();

  int order = 64;
  auto* meas = app.add_subcommand("measure-check", "Mass, orthogonality and projection-formula residuals");
  add_common(meas, mc, "residual threshold (default 1e-12)");
  meas->add_option("--order", order, "trapezoid nodes on the circle")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitPass : kExitError;
  }

  try {
    for (Common* c : {&hc, &ec, &ic, &mc})
      if (c->threads < 1) throw Error(ErrorKind::InvalidArgument, "--threads must be at least 1");
    if (*height) return cmd_height(hc, ha);
    if (*eq)
      return cmd_equidist(ec, config_path, eq->count("--seed") > 0, eq->count("--threads") > 0,
                          eq->count("--precision-bits") > 0, eq->count("--format") > 0);
    if (*iso) return cmd_isogeny_check(ic, ia);
    if (*meas) return cmd_measure_check(mc, order);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
