#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace oscneg {

enum class DistributionKind { uniform, table };

/// Piecewise-constant probability density on [0, k_max]. Bin i covers
/// (edges[i-1], edges[i]] with edges[-1] = 0; the density must be
/// non-negative and integrate to 1.
struct DensityTable {
  std::vector<double> edges;    // ascending bin upper edges, last = k_max
  std::vector<double> density;  // one value per bin
  std::vector<double> cdf;      // cumulative mass at each upper edge

  void validate_and_build();
};

/// Distribution of the i.i.d. random spring constants, plus the master
/// seed that keys every draw. Stateless: all sampling is a pure function
/// of (master_seed, sample_index, site, attempt).
struct DisorderSpec {
  DistributionKind kind = DistributionKind::uniform;
  double k_max = 1.0;
  std::uint64_t master_seed = 0;
  DensityTable table;  // used when kind == table

  static DisorderSpec uniform(double k_max, std::uint64_t master_seed);
  static DisorderSpec from_density_file(const std::filesystem::path& file,
                                        std::uint64_t master_seed);
};

struct DisorderSample {
  std::vector<double> k;
  std::int64_t sample_index = 0;
};

/// Map u in [0,1) into the support of the distribution; monotone
/// non-decreasing in u.
double inverse_cdf(const DisorderSpec& spec, double u);

/// n i.i.d. draws for the given sample index. Deterministic in
/// (spec, sample_index, n) regardless of call order or thread count.
/// A draw that lands exactly on 0 is redrawn.
DisorderSample draw(const DisorderSpec& spec, std::int64_t sample_index, int n);

/// Counter-based uniform variate on [0,1): splitmix64 finalizer applied
/// to the (seed, sample, site, attempt) key.
double uniform01(std::uint64_t master_seed, std::uint64_t sample_index,
                 std::uint64_t site, std::uint64_t attempt);

}  // namespace oscneg
