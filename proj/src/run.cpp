#include "cmcfol/run.hpp"

#include "cmcfol/h2.hpp"
#include "cmcfol/io.hpp"
#include "cmcfol/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <optional>

namespace cmcfol::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

fs::path output_dir(const Options& opt, const std::string& fallback) {
  if (opt.out) return *opt.out;
  if (const char* env = std::getenv(kOutputEnv); env && *env) return env;
  return fallback;
}

io::RunConfig configure(const std::string& path, const Options& opt) {
  io::RunConfig c = io::load_config(path);
  if (opt.seed) c.seed = c.solver.seed = *opt.seed;
  if (opt.jobs) {
    if (*opt.jobs < 1) throw io::ConfigError("--jobs must be >= 1");
    c.jobs = *opt.jobs;
  }
  c.source = io::to_json(c);
  return c;
}

// The config as recorded in artifacts; the output directory is left out so
// runs into different directories compare equal.
json recorded(const io::RunConfig& c) {
  json j = c.source;
  j.erase("output");
  return j;
}

void write_json(const fs::path& p, const json& j) { io::write_atomic(p, j.dump(2) + "\n"); }

// Runs f, mapping configuration errors to exit 1.
template <class F>
int guarded(std::ostream& log, F f) {
  try {
    return f();
  } catch (const io::ConfigError& e) {
    log << "config error: " << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    log << "error: " << e.what() << "\n";
  } catch (const json::exception& e) {
    log << "config error: " << e.what() << "\n";
  } catch (const fs::filesystem_error& e) {
    log << "i/o error: " << e.what() << "\n";
  }
  return kConfig;
}

}  // namespace

int cmd_solve(const std::string& config, double H, const Options& opt, std::ostream& log) {
  return guarded(log, [&] {
    const io::RunConfig c = configure(config, opt);
    if (!(std::abs(H) < 1.0)) {
      throw std::invalid_argument("|H| < 1 is required: a surface with ideal boundary a curve has |H| < 1 (H = " +
                                  std::to_string(H) + ")");
    }
    const fs::path dir = output_dir(opt, c.output_dir);
    const std::string tag = io::h_label(H);
    json rec{{"schemaVersion", 1}, {"fingerprint", io::fingerprint(recorded(c))}, {"config", recorded(c)}};
    try {
      const SolveResult r = solve(c.curve, H, c.solver);
      io::write_atomic(dir / ("leaf_" + tag + ".obj"), io::format_obj(r.surface));
      rec["report"] = io::solve_report_json(H, r.report);
      write_json(dir / ("solve_" + tag + ".json"), rec);
      log << "H " << tag << ": converged in " << r.report.iterations << " iterations, I = " << r.report.energy.I
          << "\n";
      return static_cast<int>(kOk);
    } catch (const SolverFailure& e) {
      io::write_atomic(dir / ("leaf_" + tag + ".obj"), io::format_obj(e.last()));
      rec["report"] = io::solve_report_json(H, e.report());
      write_json(dir / ("solve_" + tag + ".json"), rec);
      log << "solver failure at H " << tag << ": " << e.what() << "\n";
      return static_cast<int>(kSolver);
    }
  });
}

int cmd_sweep(const std::string& config, const Options& opt, std::ostream& log) {
  return guarded(log, [&] {
    const io::RunConfig c = configure(config, opt);
    if (c.grid.empty()) throw io::ConfigError("sweep: the H grid is empty");
    const fs::path dir = output_dir(opt, c.output_dir);

    LeafFamily fam;
    json failure = nullptr;
    int status = kOk;
    try {
      fam = sweep(c.curve, c.grid, c.solver, c.jobs);
    } catch (const SweepFailure& e) {
      fam = e.partial();
      failure = io::solve_report_json(e.failed_H(), e.report());
      log << "sweep aborted at H " << io::h_label(e.failed_H()) << ": " << e.what() << "\n";
      status = kSolver;
    }

    json leaves = json::array();
    for (std::size_t i = 0; i < fam.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "leaves/leaf_%03zu.obj", i);
      io::write_atomic(dir / name, io::format_obj(fam.leaves[i]));
      json e = io::solve_report_json(fam.H[i], fam.reports[i]);
      e["mesh"] = name;
      e["vertices"] = fam.leaves[i].vertices.size();
      e["triangles"] = fam.leaves[i].triangles.size();
      leaves.push_back(e);
    }
    const json manifest{{"schemaVersion", 1},
                        {"fingerprint", io::fingerprint(recorded(c))},
                        {"config", recorded(c)},
                        {"complete", status == kOk},
                        {"leaves", leaves},
                        {"failure", failure}};
    write_json(dir / "manifest.json", manifest);
    io::write_atomic(dir / "sweep.csv", io::sweep_csv(fam));
    log << fam.size() << " of " << c.grid.size() << " leaves written to " << dir.string() << "\n";
    return status;
  });
}

int cmd_verify(const std::string& manifest_path, const Options& opt, std::ostream& log) {
  return guarded(log, [&] {
    json manifest;
    try {
      manifest = json::parse(io::read_file(manifest_path));
    } catch (const std::runtime_error& e) {
      throw io::ConfigError(e.what());
    }
    if (manifest.value("schemaVersion", 0) != 1) throw io::ConfigError("unsupported manifest schemaVersion");
    const io::RunConfig c = io::parse_config(manifest.at("config"));
    const fs::path base = fs::path(manifest_path).parent_path();
    LeafFamily fam{c.curve, {}, {}, {}};
    for (const auto& e : manifest.at("leaves")) {
      const fs::path mesh = base / e.at("mesh").get<std::string>();
      std::string text;
      try {
        text = io::read_file(mesh);
      } catch (const std::runtime_error& err) {
        throw io::ConfigError(std::string("missing mesh file: ") + err.what());
      }
      DiscreteSurface s = io::parse_obj(text);
      fam.H.push_back(e.at("H").get<double>());
      s.H = fam.H.back();
      fam.leaves.push_back(std::move(s));
      fam.reports.emplace_back();
    }
    if (fam.size() == 0) throw io::ConfigError("manifest lists no leaves");
    const VerificationReport rep = verify_family(fam, c.verify, manifest.value("fingerprint", ""));
    const fs::path dir = output_dir(opt, base.empty() ? fs::path(".").string() : base.string());
    write_json(dir / "report.json", io::report_json(rep));
    for (const auto& ch : rep.checks) {
      log << (ch.pass ? "PASS " : "FAIL ") << ch.name << " (margin " << ch.margin << ")"
          << (ch.detail.empty() ? "" : ": " + ch.detail) << "\n";
    }
    return rep.pass() ? static_cast<int>(kOk) : static_cast<int>(kVerify);
  });
}

int cmd_oracle(const std::string& sub, const std::string& config, const Options& opt, std::ostream& log) {
  return guarded(log, [&]() -> int {
    std::optional<io::RunConfig> c;
    if (!config.empty()) c = configure(config, opt);
    const fs::path dir = output_dir(opt, c ? c->output_dir : "out");
    const std::uint64_t seed = c ? c->seed : opt.seed.value_or(0);

    if (sub == "cap-compare") {
      if (!c) throw io::ConfigError("cap-compare needs --config with a round curve");
      const IdealCurve& k = c->curve;
      auto zero = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
      };
      if (!zero(k.cos_coeffs()) || !zero(k.sin_coeffs()) || k.dilation() != 1.0) {
        throw io::ConfigError("cap-compare needs a round curve (no Fourier terms, dilation 1)");
      }
      const IdealCircle circle(k.center().dir(), k.a0());
      const CapSide side = k.center_positive() ? CapSide::Inside : CapSide::Outside;
      std::vector<double> grid = c->grid;
      if (grid.empty()) {
        for (int i = -4; i <= 4; ++i) grid.push_back(0.2 * i);
      }
      json rows = json::array();
      bool pass = true;
      for (double H : grid) {
        try {
          const SolveResult r = solve(k, H, c->solver);
          const double dev = max_cap_deviation(r.surface, circle, H, side);
          pass = pass && dev < c->cap_tol;
          rows.push_back({{"H", H}, {"max_deviation", dev}, {"iterations", r.report.iterations}});
          log << "H " << io::h_label(H) << "  max deviation " << dev << "\n";
        } catch (const SolverFailure& e) {
          log << "solver failure at H " << io::h_label(H) << ": " << e.what() << "\n";
          return kSolver;
        }
      }
      write_json(dir / "oracle_cap_compare.json",
                 {{"schemaVersion", 1}, {"tolerance", c->cap_tol}, {"pass", pass}, {"rows", rows}});
      return pass ? kOk : kVerify;
    }

    if (sub == "h2-foliation") {
      const Vec2 p(1.0, 0.0), q(std::cos(2.0 * std::numbers::pi / 3), std::sin(2.0 * std::numbers::pi / 3));
      std::vector<double> grid;
      for (int i = -9; i <= 9; ++i) grid.push_back(0.1 * i);
      const auto r = h2::h2_foliation_check(p, q, grid);
      write_json(dir / "oracle_h2_foliation.json", {{"schemaVersion", 1},
                                                    {"pass", r.pass},
                                                    {"disjoint", r.disjoint},
                                                    {"max_intersection_offset", r.max_intersection_offset},
                                                    {"monotone", r.monotone},
                                                    {"max_distance_error", r.max_distance_error},
                                                    {"probes", r.probes},
                                                    {"fills", r.fills},
                                                    {"grid_coverage", r.grid_coverage}});
      log << (r.pass ? "PASS" : "FAIL") << " h2 foliation: offset " << r.max_intersection_offset
          << ", distance error " << r.max_distance_error << "\n";
      return r.pass ? kOk : kVerify;
    }

    if (sub == "h2-exchange") {
      const double k1 = 0.2, k2 = 0.6;
      json rows = json::array();
      int detected = 0;
      const int n = 50;
      for (int i = 0; i < n; ++i) {
        const auto [c1, c2] = h2::crossing_pair(seed + i);
        const auto e = h2::h2_exchange(c1, k1, c2, k2);
        detected += e.infeasible;
        rows.push_back({{"seed", seed + i},
                        {"Q", e.Q},
                        {"T1", e.T1},
                        {"T2", e.T2},
                        {"reduction1", e.reduction1},
                        {"reduction2", e.reduction2},
                        {"consistency_error", e.consistency_error},
                        {"infeasible", e.infeasible}});
      }
      write_json(dir / "oracle_h2_exchange.json",
                 {{"schemaVersion", 1}, {"k1", k1}, {"k2", k2}, {"detected", detected}, {"pairs", n}, {"rows", rows}});
      log << "h2 exchange: infeasibility detected on " << detected << " of " << n << " crossing pairs\n";
      return detected == n ? kOk : kVerify;
    }

    throw io::ConfigError("unknown oracle subcommand '" + sub + "' (cap-compare, h2-foliation, h2-exchange)");
  });
}

}  // namespace cmcfol::cli
