#include "oscneg/disorder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace oscneg {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

double uniform01(std::uint64_t master_seed, std::uint64_t sample_index,
                 std::uint64_t site, std::uint64_t attempt) {
  std::uint64_t h = splitmix64(master_seed);
  h = splitmix64(h ^ sample_index);
  h = splitmix64(h ^ site);
  h = splitmix64(h ^ attempt);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

void DensityTable::validate_and_build() {
  if (edges.empty() || edges.size() != density.size())
    throw std::invalid_argument("density table needs matching edges and density columns");
  double prev = 0.0;
  double mass = 0.0;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!(edges[i] > prev))
      throw std::invalid_argument("density table edges must be strictly increasing from 0");
    if (!(density[i] >= 0.0) || !std::isfinite(density[i]))
      throw std::invalid_argument("density values must be non-negative and finite");
    mass += density[i] * (edges[i] - prev);
    prev = edges[i];
  }
  if (std::abs(mass - 1.0) > 1e-6)
    throw std::invalid_argument("density table integrates to " + std::to_string(mass) +
                                ", expected 1");
  // Renormalize the residual rounding so the CDF ends exactly at 1.
  cdf.resize(edges.size());
  double acc = 0.0;
  prev = 0.0;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    acc += density[i] * (edges[i] - prev) / mass;
    cdf[i] = acc;
    prev = edges[i];
  }
  cdf.back() = 1.0;
}

DisorderSpec DisorderSpec::uniform(double k_max, std::uint64_t master_seed) {
  if (!(k_max > 0)) throw std::invalid_argument("k_max must be positive");
  DisorderSpec spec;
  spec.kind = DistributionKind::uniform;
  spec.k_max = k_max;
  spec.master_seed = master_seed;
  return spec;
}

DisorderSpec DisorderSpec::from_density_file(const std::filesystem::path& file,
                                             std::uint64_t master_seed) {
  std::ifstream in(file);
  if (!in) throw std::invalid_argument("cannot open density file: " + file.string());
  DisorderSpec spec;
  spec.kind = DistributionKind::table;
  spec.master_seed = master_seed;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double edge, value;
    if (!(ls >> edge)) continue;
    if (!(ls >> value))
      throw std::invalid_argument(file.string() + ":" + std::to_string(lineno) +
                                  ": expected 'upper_edge density' pair");
    spec.table.edges.push_back(edge);
    spec.table.density.push_back(value);
  }
  spec.table.validate_and_build();
  spec.k_max = spec.table.edges.back();
  return spec;
}

double inverse_cdf(const DisorderSpec& spec, double u) {
  if (!(u >= 0.0) || u >= 1.0) throw std::invalid_argument("inverse_cdf requires u in [0,1)");
  if (spec.kind == DistributionKind::uniform) return u * spec.k_max;

  const auto& t = spec.table;
  auto it = std::lower_bound(t.cdf.begin(), t.cdf.end(), u);
  std::size_t bin = static_cast<std::size_t>(it - t.cdf.begin());
  if (bin >= t.cdf.size()) bin = t.cdf.size() - 1;
  double lo_edge = bin == 0 ? 0.0 : t.edges[bin - 1];
  double lo_cdf = bin == 0 ? 0.0 : t.cdf[bin - 1];
  double mass = t.cdf[bin] - lo_cdf;
  if (mass <= 0.0) return t.edges[bin];  // zero-density bin: jump to its upper edge
  double frac = (u - lo_cdf) / mass;
  return lo_edge + frac * (t.edges[bin] - lo_edge);
}

DisorderSample draw(const DisorderSpec& spec, std::int64_t sample_index, int n) {
  if (n < 1) throw std::invalid_argument("draw requires n >= 1");
  DisorderSample out;
  out.sample_index = sample_index;
  out.k.resize(n);
  for (int site = 0; site < n; ++site) {
    double value = 0.0;
    for (std::uint64_t attempt = 0;; ++attempt) {
      double u = uniform01(spec.master_seed, static_cast<std::uint64_t>(sample_index),
                           static_cast<std::uint64_t>(site), attempt);
      value = inverse_cdf(spec, u);
      if (value > 0.0) break;  // k = 0 has probability zero; redraw
    }
    out.k[site] = value;
  }
  return out;
}

}  // namespace oscneg
