#ifndef CONECUSP_TOOLS_COMMANDS_HPP
#define CONECUSP_TOOLS_COMMANDS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "conecusp/metric.hpp"
#include "conecusp/schwarzian.hpp"
#include "json_writer.hpp"

namespace conecusp::cli {

struct RunOptions {
  std::optional<std::string> config_path;
  std::optional<std::string> config_text;  // used when no path is given
  std::optional<std::string> out_dir;
  unsigned threads = 1;
  std::vector<std::string> tol_overrides;
  std::uint64_t seed = 1;
  int n_max = 12;
};

struct Outcome {
  int exit_code = 0;
  std::string out;  // JSON report
  std::string err;  // log lines, then error JSON on failure
};

/// classify, rouche, verify, grid, zeros or lambda0.
Outcome run(const std::string& command, const RunOptions& options);

const std::vector<std::string>& command_names();

struct RoucheReport {
  int N = 0;
  double r_N = 0.0;
  double min_fN = 0.0;
  double max_gN_bound = 0.0;  // sum_{j>N} 1/j^2
  double sampled_max_gN = 0.0;
  bool inequality_holds = false;
  int zero_count_fN = 0;
  int zero_count_h0 = 0;
  double fN_lower_bound = 0.0;  // a_1 / r_N
  double gN_exact_bound = 0.0;  // sum_{j>N} a_j / (|z_j| - r_N)
  double truncation_error = 0.0;
  std::size_t retained_terms = 0;
};

RoucheReport rouche_report(int N, std::size_t samples = 4096);
Json to_json(const RoucheReport& r);
Json to_json(const SingularityReport& r);

/// x,y,u,masked rows, iy outer; masked rows leave u empty.
std::string grid_csv(const MetricGrid& grid);
/// Binary 8-bit PGM, top row at the largest y, u rescaled to [0, 255].
std::string grid_pgm(const MetricGrid& grid, double& u_min, double& u_max);

/// Writes through a temporary file and a rename.
void write_atomic(const std::string& path, const std::string& bytes);

}  // namespace conecusp::cli

#endif  // CONECUSP_TOOLS_COMMANDS_HPP
