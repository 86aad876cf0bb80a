#include "cmcfol/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace cmcfol::io {

namespace {

const std::vector<std::string> kCheckNames{"pairwise_disjoint", "probe_monotone",        "fill_scan",
                                           "hull_containment",  "translate_disjointness", "area_bound",
                                           "boundary_slope"};

void expect_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
  }
}

template <class T>
T get_or(const json& j, const std::string& key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

double positive(double v, const std::string& what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(what + " must be positive");
  return v;
}

double clean(double v) {
  v = std::round(v * 1e12) / 1e12;
  return v == 0.0 ? 0.0 : v;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
  return buf;
}

}  // namespace

RunConfig parse_config(const json& doc) {
  expect_keys(doc, "config", {"curve", "sweep", "solver", "verify", "output", "seed"});
  RunConfig c;

  if (!doc.contains("curve")) throw ConfigError("config: missing 'curve' block");
  const json& cj = doc.at("curve");
  expect_keys(cj, "curve", {"center", "a0", "cos", "sin", "center_positive", "dilation"});
  const auto center = get_or<std::vector<double>>(cj, "center", {0.0, 0.0, 1.0}, "curve");
  if (center.size() != 3) throw ConfigError("curve.center must have 3 components");
  const Vec3 cv(center[0], center[1], center[2]);
  if (!(cv.norm() > 0.0)) throw ConfigError("curve.center must be nonzero");
  try {
    c.curve = IdealCurve(IdealPoint(cv.normalized()), get_or<double>(cj, "a0", std::numbers::pi / 3, "curve"),
                         get_or<std::vector<double>>(cj, "cos", {}, "curve"),
                         get_or<std::vector<double>>(cj, "sin", {}, "curve"),
                         get_or<bool>(cj, "center_positive", true, "curve"),
                         get_or<double>(cj, "dilation", 1.0, "curve"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("curve: ") + e.what());
  }

  const json sj = doc.value("solver", json::object());
  expect_keys(sj, "solver",
              {"eps", "resolution", "max_iterations", "tolerance", "initial_step", "shrink", "armijo",
               "max_displacement", "h_cap"});
  SolverConfig& s = c.solver;
  s.eps = get_or(sj, "eps", s.eps, "solver");
  s.resolution = get_or(sj, "resolution", s.resolution, "solver");
  s.max_iterations = get_or(sj, "max_iterations", s.max_iterations, "solver");
  s.tolerance = get_or(sj, "tolerance", s.tolerance, "solver");
  s.initial_step = get_or(sj, "initial_step", s.initial_step, "solver");
  s.shrink = get_or(sj, "shrink", s.shrink, "solver");
  s.armijo = get_or(sj, "armijo", s.armijo, "solver");
  s.max_displacement = get_or(sj, "max_displacement", s.max_displacement, "solver");
  s.h_cap = get_or(sj, "h_cap", s.h_cap, "solver");
  c.seed = get_or<std::uint64_t>(doc, "seed", 0, "config");
  s.seed = c.seed;
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("solver: ") + e.what());
  }

  const json wj = doc.value("sweep", json::object());
  expect_keys(wj, "sweep", {"grid", "from", "to", "step", "jobs"});
  if (wj.contains("grid")) {
    if (wj.contains("from") || wj.contains("to") || wj.contains("step")) {
      throw ConfigError("sweep: give either 'grid' or 'from'/'to'/'step'");
    }
    for (double h : get_or<std::vector<double>>(wj, "grid", {}, "sweep")) c.grid.push_back(clean(h));
  } else if (wj.contains("from") || wj.contains("to") || wj.contains("step")) {
    const double from = get_or<double>(wj, "from", 0.0, "sweep");
    const double to = get_or<double>(wj, "to", 0.0, "sweep");
    const double step = positive(get_or<double>(wj, "step", 0.0, "sweep"), "sweep.step");
    if (to < from) throw ConfigError("sweep: 'to' must be >= 'from'");
    const long n = std::lround((to - from) / step);
    if (std::abs(from + n * step - to) > 1e-9 * std::max(1.0, std::abs(to))) {
      throw ConfigError("sweep: (to - from) must be a multiple of step");
    }
    for (long k = 0; k <= n; ++k) c.grid.push_back(clean(from + k * step));
  }
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    if (!(std::abs(c.grid[i]) <= s.h_cap)) throw ConfigError("sweep: H values must lie within [-h_cap, h_cap]");
    if (i > 0 && !(c.grid[i] > c.grid[i - 1])) throw ConfigError("sweep: grid must be strictly increasing");
  }
  c.jobs = get_or<int>(wj, "jobs", 1, "sweep");
  if (c.jobs < 1) throw ConfigError("sweep.jobs must be >= 1");

  const json vj = doc.value("verify", json::object());
  expect_keys(vj, "verify",
              {"checks", "probes", "min_valid", "hull_budget", "hull_tol", "fill_slack", "radii", "dilation",
               "slope_tol", "cap_tol"});
  VerifyOptions& v = c.verify;
  if (vj.contains("checks")) {
    const auto names = get_or<std::vector<std::string>>(vj, "checks", {}, "verify");
    std::set<std::string> on(names.begin(), names.end());
    for (const auto& n : on) {
      if (std::find(kCheckNames.begin(), kCheckNames.end(), n) == kCheckNames.end()) {
        throw ConfigError("verify.checks: unknown check '" + n + "'");
      }
    }
    v.disjoint = on.count("pairwise_disjoint");
    v.monotone = on.count("probe_monotone");
    v.fill = on.count("fill_scan");
    v.hull = on.count("hull_containment");
    v.translate = on.count("translate_disjointness");
    v.area = on.count("area_bound");
    v.slope = on.count("boundary_slope");
  }
  v.probes = get_or(vj, "probes", v.probes, "verify");
  if (v.probes < 1) throw ConfigError("verify.probes must be >= 1");
  v.min_valid = get_or(vj, "min_valid", v.min_valid, "verify");
  if (!(v.min_valid >= 0.0 && v.min_valid <= 1.0)) throw ConfigError("verify.min_valid must lie in [0, 1]");
  v.hull_budget = get_or(vj, "hull_budget", v.hull_budget, "verify");
  if (v.hull_budget < 1) throw ConfigError("verify.hull_budget must be >= 1");
  v.hull_tol = positive(get_or(vj, "hull_tol", v.hull_tol, "verify"), "verify.hull_tol");
  v.fill_slack = positive(get_or(vj, "fill_slack", v.fill_slack, "verify"), "verify.fill_slack");
  v.radii = get_or(vj, "radii", v.radii, "verify");
  for (double r : v.radii) positive(r, "verify.radii");
  const auto dil = get_or<std::vector<double>>(vj, "dilation", {v.dilation_t, v.dilation_s}, "verify");
  if (dil.size() != 2 || dil[0] == dil[1]) throw ConfigError("verify.dilation must be two distinct values");
  v.dilation_t = positive(dil[0], "verify.dilation");
  v.dilation_s = positive(dil[1], "verify.dilation");
  v.slope_tol = positive(get_or(vj, "slope_tol", v.slope_tol, "verify"), "verify.slope_tol");
  v.h_cap = s.h_cap;
  c.cap_tol = positive(get_or(vj, "cap_tol", c.cap_tol, "verify"), "verify.cap_tol");

  const json oj = doc.value("output", json::object());
  expect_keys(oj, "output", {"directory", "mesh"});
  c.output_dir = get_or<std::string>(oj, "directory", c.output_dir, "output");
  if (get_or<std::string>(oj, "mesh", "obj", "output") != "obj") throw ConfigError("output.mesh: only 'obj' is supported");

  c.source = to_json(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

json to_json(const RunConfig& c) {
  const IdealCurve& k = c.curve;
  const Vec3& d = k.center().dir();
  json j;
  j["curve"] = {{"center", {d.x(), d.y(), d.z()}}, {"a0", k.a0()},           {"cos", k.cos_coeffs()},
                {"sin", k.sin_coeffs()},          {"center_positive", k.center_positive()},
                {"dilation", k.dilation()}};
  j["sweep"] = {{"grid", c.grid}, {"jobs", c.jobs}};
  const SolverConfig& s = c.solver;
  j["solver"] = {{"eps", s.eps},
                 {"resolution", s.resolution},
                 {"max_iterations", s.max_iterations},
                 {"tolerance", s.tolerance},
                 {"initial_step", s.initial_step},
                 {"shrink", s.shrink},
                 {"armijo", s.armijo},
                 {"max_displacement", s.max_displacement},
                 {"h_cap", s.h_cap}};
  const VerifyOptions& v = c.verify;
  json checks = json::array();
  const bool on[] = {v.disjoint, v.monotone, v.fill, v.hull, v.translate, v.area, v.slope};
  for (std::size_t i = 0; i < kCheckNames.size(); ++i) {
    if (on[i]) checks.push_back(kCheckNames[i]);
  }
  j["verify"] = {{"checks", checks},         {"probes", v.probes},       {"min_valid", v.min_valid},
                 {"hull_budget", v.hull_budget}, {"hull_tol", v.hull_tol}, {"fill_slack", v.fill_slack},
                 {"radii", v.radii},         {"dilation", {v.dilation_t, v.dilation_s}},
                 {"slope_tol", v.slope_tol}, {"cap_tol", c.cap_tol}};
  j["output"] = {{"directory", c.output_dir}, {"mesh", "obj"}};
  j["seed"] = c.seed;
  return j;
}

std::string fingerprint(const json& j) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& data) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << data;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_obj(const DiscreteSurface& s) {
  std::string out = "# cmcfol leaf\n# H " + fmt17(s.H) + "\n# eps " + fmt17(s.eps) + "\n# boundary";
  for (int b : s.boundary) out += " " + std::to_string(b + 1);
  out += "\n";
  for (const auto& v : s.vertices) out += "v " + fmt17(v.x()) + " " + fmt17(v.y()) + " " + fmt17(v.z()) + "\n";
  for (const auto& t : s.triangles) {
    out += "f " + std::to_string(t[0] + 1) + " " + std::to_string(t[1] + 1) + " " + std::to_string(t[2] + 1) + "\n";
  }
  return out;
}

DiscreteSurface parse_obj(const std::string& text) {
  DiscreteSurface s;
  s.provenance = Provenance::Solved;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool have_boundary = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    auto bad = [&] { return ConfigError("mesh line " + std::to_string(lineno) + ": malformed '" + line + "'"); };
    if (tag == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) throw bad();
      s.vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      Tri t;
      for (int& i : t) {
        std::string tok;
        if (!(ls >> tok)) throw bad();
        i = std::stoi(tok.substr(0, tok.find('/'))) - 1;
      }
      s.triangles.push_back(t);
    } else if (tag == "#") {
      std::string key;
      ls >> key;
      if (key == "H") {
        if (!(ls >> s.H)) throw bad();
      } else if (key == "eps") {
        if (!(ls >> s.eps)) throw bad();
      } else if (key == "boundary") {
        have_boundary = true;
        int b;
        while (ls >> b) s.boundary.push_back(b - 1);
      }
    }
  }
  const int n = static_cast<int>(s.vertices.size());
  for (const auto& t : s.triangles) {
    for (int i : t) {
      if (i < 0 || i >= n) throw ConfigError("mesh face index out of range");
    }
  }
  for (int b : s.boundary) {
    if (b < 0 || b >= n) throw ConfigError("mesh boundary index out of range");
  }
  if (!have_boundary || s.triangles.empty()) throw ConfigError("mesh lacks faces or the boundary record");
  return s;
}

json solve_report_json(double H, const SolveReport& r) {
  return {{"H", H},
          {"converged", r.converged},
          {"iterations", r.iterations},
          {"grad_norm", r.grad_norm},
          {"min_triangle_area", r.min_triangle_area},
          {"A", r.energy.A},
          {"V", r.energy.V},
          {"I", r.energy.I},
          {"residual_median", r.residual.median},
          {"residual_p90", r.residual.p90},
          {"residual_max", r.residual.max},
          {"message", r.message}};
}

std::string sweep_csv(const LeafFamily& f) {
  std::string out = "H,A,V,I,residual_median\n";
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto& r = f.reports[i];
    out += fmt17(f.H[i]) + "," + fmt17(r.energy.A) + "," + fmt17(r.energy.V) + "," + fmt17(r.energy.I) + "," +
           fmt17(r.residual.median) + "\n";
  }
  return out;
}

json report_json(const VerificationReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"margin", c.margin}, {"params", c.params},
                      {"detail", c.detail}});
  }
  return {{"schemaVersion", 1}, {"fingerprint", r.fingerprint}, {"pass", r.pass()}, {"checks", checks}};
}

std::string h_label(double H) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.4f", H == 0.0 ? 0.0 : H);
  return buf;
}

}  // namespace cmcfol::io
