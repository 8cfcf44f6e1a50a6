#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "oscneg/config.hpp"

namespace oscneg {

/// Raised when every sample at some ensemble point was rejected.
class all_samples_rejected : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One row of the per-sample CSV. beta is +infinity for ground-state
/// rows; negativity/entropy/bound are NaN on rejected samples (min_eig
/// then carries the offending eigenvalue).
struct SampleRecord {
  std::int64_t sample_index = 0;
  int volume = 0;
  double beta = 0.0;
  double negativity = 0.0;
  double entropy = 0.0;
  double bound = 0.0;
  double min_eig = 0.0;
  double condition_number = 0.0;
  bool rejected = false;
};

struct Aggregate {
  int accepted = 0;
  int rejected = 0;
  double mean_negativity = 0.0;
  double stderr_negativity = 0.0;
  double mean_entropy = 0.0;  // NaN when no entropy was recorded
  double stderr_entropy = 0.0;
  double mean_bound = 0.0;
  double stderr_bound = 0.0;
  double max_condition = 0.0;
};

/// Mean and standard error (unbiased sample variance) over the accepted
/// records.
Aggregate aggregate_records(const std::vector<SampleRecord>& records);

/// Graph plus distinguished subregion for one volume of the sweep.
/// The volume parameter n maps to 2n+1 sites per side for paths and
/// boxes and to the tree depth for bethe graphs.
struct VolumeInstance {
  std::shared_ptr<const Graph> graph;
  Region region0;
  int label = 0;
};

VolumeInstance build_volume(const ExperimentConfig& cfg, int n);

/// Deterministic map over sample indices on a small thread pool.
void parallel_samples(int n_samples, int workers, const std::function<void(int)>& fn);

/// Full single-sample pipeline for the ensemble experiments.
SampleRecord negativity_record(const VolumeInstance& vol, const ExperimentConfig& cfg,
                               const DisorderSpec& dspec, std::optional<double> beta,
                               int sample_index);

/// %.17g formatting used for every floating-point CSV field.
std::string format_g17(double value);

int run_area_law(const ExperimentConfig& cfg);
int run_thermal_sweep(const ExperimentConfig& cfg);
int run_correlator(const ExperimentConfig& cfg);
int run_selfcheck(const ExperimentConfig& cfg);

/// Dispatch on cfg.type; returns the process exit code.
int run_experiment(const ExperimentConfig& cfg);

}  // namespace oscneg
