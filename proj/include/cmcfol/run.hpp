// Command layer behind the cmcfol executable. Every command returns its
// exit status: 0 success, 1 configuration or usage error, 2 solver failure,
// 3 verification failure.
#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace cmcfol::cli {

enum Exit { kOk = 0, kConfig = 1, kSolver = 2, kVerify = 3 };

struct Options {
  std::optional<std::string> out;  // beats CMCFOL_OUTPUT_DIR, which beats the config
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
};

/// Environment variable that overrides the configured output directory.
inline constexpr const char* kOutputEnv = "CMCFOL_OUTPUT_DIR";

int cmd_solve(const std::string& config, double H, const Options& opt, std::ostream& log);
int cmd_sweep(const std::string& config, const Options& opt, std::ostream& log);
int cmd_verify(const std::string& manifest, const Options& opt, std::ostream& log);
/// sub is cap-compare, h2-foliation or h2-exchange. cap-compare needs a
/// config with a round curve; the h2 suites ignore it when empty.
int cmd_oracle(const std::string& sub, const std::string& config, const Options& opt, std::ostream& log);

}  // namespace cmcfol::cli
