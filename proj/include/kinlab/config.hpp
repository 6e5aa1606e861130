#pragma once

// Run configuration: an INI-like document of flat sections.
//
//   # comment
//   [lattice]
//   n_per_axis = 64
//   amplitudes = 1, 1
//
// A key may also be written fully qualified ("lattice.n_per_axis = 64")
// outside any section. Lists are comma separated.

#include <cstdint>
#include <string>
#include <vector>

#include "kinlab/errors.hpp"
#include "kinlab/reservoir.hpp"
#include "kinlab/types.hpp"

namespace kinlab {

/// Bad configuration text or value; line and column are 1-based (0 if unknown).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0, int column = 0);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_, column_;
};

struct LatticeConfig {
  int d_lat = 1;
  int n_per_axis = 64;
  std::vector<double> amplitudes{1.0};
};

struct DriveConfig {
  std::vector<double> chi{0.0};
};

struct ProbeConfig {
  std::vector<double> kappa{0.1};
  std::vector<double> lambdas{0.2, 0.1, 0.05, 0.025};
  cplx z = 0.0;
  std::vector<double> large_field{20.0, 40.0, 80.0, 160.0};
};

struct EvolveConfig {
  double t_end = 0.0;  // 0: 5 / a0
  int samples = 11;
  std::string method = "eig";
};

struct MonteCarloConfig {
  int n_traj = 20000;
  double horizon = 200.0;
  std::uint64_t seed = 1;
  double burn_in = 0.2;
};

struct OutputConfig {
  std::string format = "csv";
  std::string path;  // empty: <command>.csv in the working directory
};

struct RunConfig {
  LatticeConfig lattice;
  ReservoirSpec reservoir;
  DriveConfig drive;
  ProbeConfig probes;
  EvolveConfig evolve;
  MonteCarloConfig mc;
  OutputConfig output;

  Vec chi() const;
  Vec kappa() const;
};

/// Parses and validates. `overrides` are "section.key=value" strings applied
/// after the document; they may replace document keys but not each other.
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});

/// Canonical text of every field, one "section.key=value" per line.
std::string canonical_config(const RunConfig& config);

/// FNV-1a 64 of the canonical text, as 16 hex digits.
std::string config_fingerprint(const RunConfig& config);

}  // namespace kinlab
