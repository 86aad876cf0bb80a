// Run configuration, mesh files and JSON/CSV artifacts.
#pragma once

#include "cmcfol/verifier.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cmcfol::io {

using json = nlohmann::json;

/// Thrown for unreadable or malformed configuration and artifacts.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  IdealCurve curve;
  std::vector<double> grid;
  SolverConfig solver;
  VerifyOptions verify;
  std::string output_dir = "out";
  double cap_tol = 5e-3;  // oracle cap-compare threshold
  std::uint64_t seed = 0;
  int jobs = 1;
  json source;  // normalized echo of the file, with defaults filled in
};

/// Parses and validates a configuration document (see README for keys).
/// Unknown keys are rejected.
RunConfig parse_config(const json& doc);
RunConfig load_config(const std::filesystem::path& path);
/// Normalized JSON form of a configuration; parse_config(to_json(c)) == c.
json to_json(const RunConfig& c);

/// FNV-1a over the compact dump of a JSON value, as 16 hex digits.
std::string fingerprint(const json& j);

/// Write-then-rename.
void write_atomic(const std::filesystem::path& path, const std::string& data);
std::string read_file(const std::filesystem::path& path);

std::string format_obj(const DiscreteSurface& s);
DiscreteSurface parse_obj(const std::string& text);

json solve_report_json(double H, const SolveReport& r);
std::string sweep_csv(const LeafFamily& f);
json report_json(const VerificationReport& r);

/// "+0.5000" style label used in file names; -0 prints as +0.0000.
std::string h_label(double H);

}  // namespace cmcfol::io
