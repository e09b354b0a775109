#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace qherm::cli {

enum ExitCode : int { kPass = 0, kUsage = 2, kVerifyFail = 3, kDomain = 4 };

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  double lambda = 1.0;
  int n = 1;
  int N = 32;
  int M = 4;
  int quad_order = 64;
  int quad4_order = 16;
  std::map<std::string, double> tol_overrides;  // keyed "suite.check"
  unsigned seed = 0;
  std::string out_dir = "qherm_out";

  void validate() const;  // throws ConfigError
  double tol(const std::string& key, double def) const;
  nlohmann::json to_json() const;
};

// Unknown keys and wrongly typed values are rejected.
void apply_config_json(RunConfig& cfg, const nlohmann::json& j);
RunConfig load_config_file(const std::string& path);

struct Check {
  std::string suite;
  std::string name;
  std::string anchor;
  std::optional<double> residual;  // empty when skipped
  double tolerance = 0.0;
  std::string status;  // PASS, FAIL, SKIPPED-UNDERRESOLVED
  nlohmann::json to_json() const;
};

struct VerifyReport {
  std::string suite;
  nlohmann::json config;
  std::vector<Check> checks;
  bool passed() const;  // skips do not count as failures
  nlohmann::json to_json() const;
};

const std::vector<std::string>& suite_names();
// "all" runs every suite; unknown names throw ConfigError.
VerifyReport run_verify(const RunConfig& cfg, const std::string& suite);

int cmd_basis(const RunConfig& cfg, std::ostream& log);
int cmd_verify(const RunConfig& cfg, const std::string& suite, std::ostream& log);
int cmd_fourier(const RunConfig& cfg, const std::string& input, std::ostream& log);
int cmd_radial(const RunConfig& cfg, const std::string& input, int k_max, std::ostream& log);
// points: JSON array of [re_z, im_z, re_w, im_w]; empty path draws 10 seeded points with |zeta| <= 1.
int cmd_bargmann_eval(const RunConfig& cfg, const std::string& input, const std::string& points, std::ostream& log);
// mu as "1,0"
int cmd_symbolic(const RunConfig& cfg, const std::string& mu, std::ostream& log);

}  // namespace qherm::cli
