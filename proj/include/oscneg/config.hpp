#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "oscneg/disorder.hpp"
#include "oscneg/gaussian.hpp"
#include "oscneg/graph.hpp"
#include "oscneg/oscillator.hpp"

namespace oscneg {

class config_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat key-value configuration with [section] headers, `key = value`
/// lines and '#' comments. Keys are addressed as "section.key". Every key
/// must be consumed by the experiment loader; leftovers are errors.
class ConfigFile {
 public:
  static ConfigFile parse_file(const std::filesystem::path& file);
  static ConfigFile parse_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);  // CLI overrides
  void erase(const std::string& key);

  std::string get_string(const std::string& key);
  std::string get_string(const std::string& key, const std::string& fallback);
  double get_double(const std::string& key);
  double get_double(const std::string& key, double fallback);
  std::int64_t get_int(const std::string& key);
  std::int64_t get_int(const std::string& key, std::int64_t fallback);
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback);
  bool get_bool(const std::string& key, bool fallback);
  std::vector<double> get_double_list(const std::string& key);
  std::vector<int> get_int_list(const std::string& key);

  /// Throws config_error naming every key that was never consumed.
  void ensure_consumed() const;

  /// Sorted "key = value" lines; input for hashing and the config echo.
  std::string canonical_text() const;
  /// FNV-1a 64-bit hash of the canonical text, as fixed-width hex.
  std::string hash_hex() const;
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::string require(const std::string& key);
  std::map<std::string, std::string> entries_;
  std::set<std::string> consumed_;
  std::string origin_;
};

enum class ExperimentType { area_law, thermal_sweep, correlator, selfcheck };

std::string to_string(ExperimentType t);

struct GraphConfig {
  GraphFamily family = GraphFamily::path;
  int nu = 1;                // box dimension
  int branching = 2;         // bethe
  bool regular_root = true;  // bethe
  std::string edge_file;     // custom
  int cap = Graph::default_vertex_cap;
};

struct RegionSpec {
  std::optional<int> radius;   // centered interval/box/ball radius
  std::vector<int> sites;      // explicit member list (overrides radius)
};

struct StateConfig {
  StateKind kind = StateKind::ground;
  double beta = 0.0;            // thermal area_law/correlator
  std::vector<double> betas;    // thermal_sweep
};

enum class SelfcheckInjection { none, clip_tolerance, wrong_sign_l };

struct ExperimentConfig {
  ExperimentType type = ExperimentType::selfcheck;
  std::uint64_t seed = 0;
  int samples = 1;
  int workers = 0;  // 0: pick from hardware
  std::string out_prefix;
  std::vector<int> volumes;

  GraphConfig graph;
  RegionSpec region;
  ModelParams model;
  HpSpec hp;
  double assumption_c = 1e8;
  StateConfig state;

  DistributionKind disorder_kind = DistributionKind::uniform;
  double k_max = 1.0;
  std::string density_file;

  int correlator_max_distance = 15;
  SelfcheckInjection inject = SelfcheckInjection::none;

  std::string config_hash;
  std::map<std::string, std::string> echo;  // canonical config for the summary

  DisorderSpec disorder_spec() const;
};

struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<std::string> out;
  std::optional<int> workers;
};

/// Validates and assembles the experiment description; consumes every
/// recognized key and rejects any leftovers.
ExperimentConfig load_experiment_config(ConfigFile& file, ExperimentType type,
                                        const CliOverrides& overrides = {});

}  // namespace oscneg
