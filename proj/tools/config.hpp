#ifndef CONECUSP_TOOLS_CONFIG_HPP
#define CONECUSP_TOOLS_CONFIG_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "conecusp/meromorphic.hpp"

namespace conecusp::cli {

/// Malformed or inconsistent configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File-system failure (exit code 4).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kSchemaVersion = 1;

/// Named tolerances with defaults; unknown names are rejected.
class Tolerances {
 public:
  Tolerances();

  double get(const std::string& name) const;
  void set(const std::string& name, double value);
  const std::map<std::string, double>& all() const { return values_; }

 private:
  std::map<std::string, double> values_;
};

struct InstanceConfig {
  std::vector<Term> terms;  // explicit source
  std::string generator;    // non-empty for a named generator
  std::size_t tail_start = 0;
  std::optional<double> lambda;  // empty means auto
  Rect window;
  std::optional<Disc> domain;
  std::optional<Complex> base_point;
  double spacing = 0.01;
  Tolerances tolerances;
  bool pgm = false;
  std::size_t verify_points = 200;

  bool has_generator() const { return !generator.empty(); }
  MeromorphicSum source() const;
};

InstanceConfig parse_config(const std::string& text);
InstanceConfig load_config(const std::string& path);

/// Applies "NAME=VAL".
void apply_tolerance_override(Tolerances& tol, const std::string& assignment);

}  // namespace conecusp::cli

#endif  // CONECUSP_TOOLS_CONFIG_HPP
