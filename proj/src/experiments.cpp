#include "oscneg/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <thread>

#include <json.hpp>

#include "oscneg/fock_oracle.hpp"
#include "oscneg/gaussian.hpp"
#include "oscneg/spectra.hpp"

namespace oscneg {

namespace {

using json = nlohmann::ordered_json;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

struct MeanStderr {
  double mean = kNaN;
  double se = kNaN;
  int count = 0;
};

MeanStderr mean_stderr(const std::vector<double>& values) {
  MeanStderr out;
  out.count = static_cast<int>(values.size());
  if (out.count == 0) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / out.count;
  if (out.count < 2) {
    out.se = 0.0;
    return out;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.se = std::sqrt(ss / (out.count - 1) / out.count);
  return out;
}

double json_number(double v) { return v; }  // NaN/inf serialize as null

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

void write_samples_csv(const std::string& path, const std::vector<SampleRecord>& records) {
  std::ofstream out = open_output(path);
  out << "sample_index,n,beta,negativity,entropy,bound,min_eig,rejected\n";
  for (const auto& r : records) {
    out << r.sample_index << ',' << r.volume << ',' << format_g17(r.beta) << ','
        << format_g17(r.negativity) << ',' << format_g17(r.entropy) << ','
        << format_g17(r.bound) << ',' << format_g17(r.min_eig) << ','
        << (r.rejected ? 1 : 0) << '\n';
  }
}

json config_echo_json(const ExperimentConfig& cfg) {
  json echo = json::object();
  for (const auto& [key, value] : cfg.echo) echo[key] = value;
  return echo;
}

json base_summary(const ExperimentConfig& cfg) {
  json summary = json::object();
  summary["experiment"] = to_string(cfg.type);
  summary["config_hash"] = cfg.config_hash;
  summary["config"] = config_echo_json(cfg);
  return summary;
}

void finish_summary(json& summary, const std::string& path,
                    std::chrono::steady_clock::time_point start) {
  double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  summary["timing"] = {{"wall_seconds", seconds}};
  std::ofstream out = open_output(path);
  out << summary.dump(2) << '\n';
}

json aggregate_json(const Aggregate& agg) {
  json out = json::object();
  out["accepted"] = agg.accepted;
  out["rejected"] = agg.rejected;
  out["mean_negativity"] = json_number(agg.mean_negativity);
  out["stderr_negativity"] = json_number(agg.stderr_negativity);
  out["mean_entropy"] = json_number(agg.mean_entropy);
  out["stderr_entropy"] = json_number(agg.stderr_entropy);
  out["mean_bound"] = json_number(agg.mean_bound);
  out["stderr_bound"] = json_number(agg.stderr_bound);
  out["max_condition_number"] = json_number(agg.max_condition);
  return out;
}

int center_vertex(const VolumeInstance& vol, int n) {
  const Graph& g = *vol.graph;
  switch (g.family()) {
    case GraphFamily::path: return n;
    case GraphFamily::box: {
      int idx = 0;
      for (int d = 0; d < g.box_dim(); ++d) idx = idx * g.box_side() + n;
      return idx;
    }
    default: return 0;  // bethe root / custom first vertex
  }
}

}  // namespace

std::string format_g17(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

Aggregate aggregate_records(const std::vector<SampleRecord>& records) {
  Aggregate agg;
  std::vector<double> neg, ent, bnd;
  for (const auto& r : records) {
    if (r.rejected) {
      ++agg.rejected;
      continue;
    }
    ++agg.accepted;
    neg.push_back(r.negativity);
    bnd.push_back(r.bound);
    if (!std::isnan(r.entropy)) ent.push_back(r.entropy);
    agg.max_condition = std::max(agg.max_condition, r.condition_number);
  }
  MeanStderr n = mean_stderr(neg), e = mean_stderr(ent), b = mean_stderr(bnd);
  agg.mean_negativity = n.mean;
  agg.stderr_negativity = n.se;
  agg.mean_entropy = e.mean;
  agg.stderr_entropy = e.se;
  agg.mean_bound = b.mean;
  agg.stderr_bound = b.se;
  return agg;
}

VolumeInstance build_volume(const ExperimentConfig& cfg, int n) {
  VolumeInstance vol;
  vol.label = n;
  switch (cfg.graph.family) {
    case GraphFamily::path:
      vol.graph = std::make_shared<Graph>(Graph::path(2 * n + 1));
      break;
    case GraphFamily::box:
      vol.graph = std::make_shared<Graph>(Graph::box(cfg.graph.nu, 2 * n + 1));
      break;
    case GraphFamily::bethe:
      vol.graph = std::make_shared<Graph>(
          Graph::bethe(cfg.graph.branching, n, cfg.graph.regular_root));
      break;
    case GraphFamily::custom:
      vol.graph = std::make_shared<Graph>(Graph::from_edge_list_file(cfg.graph.edge_file));
      vol.label = vol.graph->n_vertices();
      break;
  }
  const Graph& g = *vol.graph;
  if (g.n_vertices() > cfg.graph.cap)
    throw config_error("volume n=" + std::to_string(n) + " has " +
                       std::to_string(g.n_vertices()) +
                       " vertices, exceeding graph.cap = " + std::to_string(cfg.graph.cap));

  if (!cfg.region.sites.empty()) {
    vol.region0 = Region(cfg.region.sites, g.n_vertices());
  } else if (cfg.region.radius) {
    int r = *cfg.region.radius;
    std::vector<int> members;
    if (g.family() == GraphFamily::path || g.family() == GraphFamily::box) {
      // Centered sub-box in coordinates.
      for (int v = 0; v < g.n_vertices(); ++v) {
        bool inside = true;
        if (g.family() == GraphFamily::path) {
          inside = std::abs(v - n) <= r;
        } else {
          for (int c : g.coordinates()[v]) {
            if (std::abs(c - n) > r) {
              inside = false;
              break;
            }
          }
        }
        if (inside) members.push_back(v);
      }
    } else {
      // Hop ball around the root.
      for (int v = 0; v < g.n_vertices(); ++v) {
        if (g.dist(0, v) <= r) members.push_back(v);
      }
    }
    vol.region0 = Region(std::move(members), g.n_vertices());
  } else {
    vol.region0 = Region({}, g.n_vertices());
  }

  if (!vol.region0.empty() && vol.region0.size() >= g.n_vertices())
    throw config_error("region covers the whole volume n=" + std::to_string(n));
  return vol;
}

void parallel_samples(int n_samples, int workers, const std::function<void(int)>& fn) {
  if (workers <= 0) {
    workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers <= 0) workers = 1;
  }
  workers = std::min(workers, n_samples);
  if (workers <= 1) {
    for (int i = 0; i < n_samples; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (;;) {
          int i = next.fetch_add(1);
          if (i >= n_samples) break;
          fn(i);
        }
      } catch (...) {
        errors[w] = std::current_exception();
        next.store(n_samples);  // stop the other workers
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

SampleRecord negativity_record(const VolumeInstance& vol, const ExperimentConfig& cfg,
                               const DisorderSpec& dspec, std::optional<double> beta,
                               int sample_index) {
  SampleRecord rec;
  rec.sample_index = sample_index;
  rec.volume = vol.label;
  rec.beta = beta ? *beta : kInf;
  rec.negativity = rec.entropy = rec.bound = kNaN;

  DisorderSample k = draw(dspec, sample_index, vol.graph->n_vertices());
  OscillatorSystem sys = make_system(vol.graph, vol.region0, k, cfg.model, cfg.hp, beta);
  validate_norm_bounds(sys, cfg.assumption_c);
  try {
    EffectiveHamiltonian h = effective_h(sys.hq, sys.hp);
    NegativityReport report = evaluate_sample(sys, h);
    rec.negativity = report.negativity;
    rec.entropy = report.entropy ? *report.entropy : kNaN;
    rec.bound = report.upper_bound_lemma41;
    rec.min_eig = h.min_eig;
    rec.condition_number = h.condition_number;
  } catch (const not_positive_definite& e) {
    rec.rejected = true;
    rec.min_eig = e.min_eig();
  }
  return rec;
}

namespace {

// Shared ensemble runner for area_law (one kind, several volumes) and
// thermal_sweep (one volume, several kinds).
struct EnsemblePoint {
  VolumeInstance vol;
  std::optional<double> beta;
};

std::vector<SampleRecord> run_point(const EnsemblePoint& point, const ExperimentConfig& cfg,
                                    const DisorderSpec& dspec) {
  std::vector<SampleRecord> records(cfg.samples);
  parallel_samples(cfg.samples, cfg.workers, [&](int i) {
    records[i] = negativity_record(point.vol, cfg, dspec, point.beta, i);
  });
  return records;
}

}  // namespace

int run_area_law(const ExperimentConfig& cfg) {
  auto start = std::chrono::steady_clock::now();
  DisorderSpec dspec = cfg.disorder_spec();
  std::optional<double> beta;
  if (cfg.state.kind == StateKind::thermal) beta = cfg.state.beta;

  std::vector<int> volumes = cfg.volumes;
  if (volumes.empty()) volumes.push_back(1);  // custom graph: single instance

  std::vector<SampleRecord> all_records;
  json volume_summaries = json::array();
  bool starved = false;
  for (int n : volumes) {
    EnsemblePoint point{build_volume(cfg, n), beta};
    std::vector<SampleRecord> records = run_point(point, cfg, dspec);
    Aggregate agg = aggregate_records(records);
    Region bdry = boundary(*point.vol.graph, point.vol.region0);

    json entry = json::object();
    entry["n"] = point.vol.label;
    entry["sites"] = point.vol.graph->n_vertices();
    entry["region_size"] = point.vol.region0.size();
    entry["boundary_size"] = bdry.size();
    entry["kind"] = beta ? "thermal" : "ground";
    entry["beta"] = beta ? json(*beta) : json(nullptr);
    entry["aggregates"] = aggregate_json(agg);
    entry["negativity_per_boundary"] =
        json_number(bdry.size() > 0 ? agg.mean_negativity / bdry.size() : kNaN);
    volume_summaries.push_back(entry);

    all_records.insert(all_records.end(), records.begin(), records.end());
    if (agg.accepted == 0) {
      starved = true;
      std::cerr << "area-law: all " << cfg.samples << " samples rejected at n = " << n
                << "\n";
      break;
    }
  }

  write_samples_csv(cfg.out_prefix + "_samples.csv", all_records);
  json summary = base_summary(cfg);
  summary["volumes"] = volume_summaries;
  finish_summary(summary, cfg.out_prefix + "_summary.json", start);
  return starved ? 4 : 0;
}

int run_thermal_sweep(const ExperimentConfig& cfg) {
  auto start = std::chrono::steady_clock::now();
  DisorderSpec dspec = cfg.disorder_spec();
  int n = cfg.volumes.empty() ? 1 : cfg.volumes.front();
  VolumeInstance vol = build_volume(cfg, n);

  // Every requested beta plus the ground-state reference point.
  std::vector<std::optional<double>> kinds;
  for (double b : cfg.state.betas) kinds.emplace_back(b);
  kinds.emplace_back(std::nullopt);

  std::vector<SampleRecord> all_records;
  json points = json::array();
  Aggregate ground_agg;
  std::vector<std::pair<double, Aggregate>> thermal_aggs;
  bool starved = false;
  for (const auto& beta : kinds) {
    EnsemblePoint point{vol, beta};
    std::vector<SampleRecord> records = run_point(point, cfg, dspec);
    Aggregate agg = aggregate_records(records);
    json entry = json::object();
    entry["beta"] = beta ? json(*beta) : json(nullptr);
    entry["kind"] = beta ? "thermal" : "ground";
    entry["n"] = vol.label;
    entry["aggregates"] = aggregate_json(agg);
    points.push_back(entry);
    all_records.insert(all_records.end(), records.begin(), records.end());
    if (beta) {
      thermal_aggs.emplace_back(*beta, agg);
    } else {
      ground_agg = agg;
    }
    if (agg.accepted == 0) {
      starved = true;
      std::cerr << "thermal: all samples rejected\n";
      break;
    }
  }

  json summary = base_summary(cfg);
  summary["points"] = points;
  if (!starved && !thermal_aggs.empty()) {
    // Agreement of the largest-beta point with the ground ensemble.
    auto largest = *std::max_element(
        thermal_aggs.begin(), thermal_aggs.end(),
        [](const auto& a, const auto& b) { return a.first < b.first; });
    double diff = std::abs(largest.second.mean_negativity - ground_agg.mean_negativity);
    double joint = 2.0 * std::hypot(largest.second.stderr_negativity,
                                    ground_agg.stderr_negativity);
    json gc = json::object();
    gc["largest_beta"] = largest.first;
    gc["difference"] = json_number(diff);
    gc["two_joint_stderr"] = json_number(joint);
    gc["consistent"] = diff <= joint;
    summary["ground_consistency"] = gc;
  }
  write_samples_csv(cfg.out_prefix + "_samples.csv", all_records);
  finish_summary(summary, cfg.out_prefix + "_summary.json", start);
  return starved ? 4 : 0;
}

int run_correlator(const ExperimentConfig& cfg) {
  auto start = std::chrono::steady_clock::now();
  DisorderSpec dspec = cfg.disorder_spec();
  int n = cfg.volumes.empty() ? 1 : cfg.volumes.front();
  VolumeInstance vol = build_volume(cfg, n);
  const Graph& g = *vol.graph;
  const int sites = g.n_vertices();
  const int x0 = center_vertex(vol, n);

  std::optional<double> beta;
  if (cfg.state.kind == StateKind::thermal) beta = cfg.state.beta;

  // Per-sample correlator rows |<d_x0, f(h) d_y>| plus rejection records.
  std::vector<std::vector<double>> rows(cfg.samples);
  std::vector<SampleRecord> records(cfg.samples);
  std::vector<double> inv_sqrt_norm(cfg.samples, 0.0);
  parallel_samples(cfg.samples, cfg.workers, [&](int i) {
    SampleRecord rec;
    rec.sample_index = i;
    rec.volume = vol.label;
    rec.beta = beta ? *beta : kInf;
    rec.negativity = rec.entropy = rec.bound = kNaN;
    DisorderSample k = draw(dspec, i, sites);
    OscillatorSystem sys =
        make_system(vol.graph, Region({}, sites), k, cfg.model, cfg.hp, beta);
    validate_norm_bounds(sys, cfg.assumption_c);
    try {
      EffectiveHamiltonian h = effective_h(sys.hq, sys.hp);
      Matrix kernel = beta ? apply(SpectralFunction::inv_sqrt_tanh(*beta), h)
                           : apply(SpectralFunction::inv_sqrt(), h);
      rows[i].resize(sites);
      for (int y = 0; y < sites; ++y) rows[i][y] = std::abs(kernel(x0, y));
      inv_sqrt_norm[i] = 1.0 / std::sqrt(h.min_eig);
      rec.min_eig = h.min_eig;
      rec.condition_number = h.condition_number;
    } catch (const not_positive_definite& e) {
      rec.rejected = true;
      rec.min_eig = e.min_eig();
    }
    records[i] = rec;
  });

  int accepted = 0;
  double mean_inv_sqrt_norm = 0.0;
  for (int i = 0; i < cfg.samples; ++i) {
    if (!records[i].rejected) {
      ++accepted;
      mean_inv_sqrt_norm += inv_sqrt_norm[i];
    }
  }
  write_samples_csv(cfg.out_prefix + "_samples.csv", records);
  if (accepted == 0) {
    std::cerr << "correlator: all samples rejected\n";
    json summary = base_summary(cfg);
    summary["fit"] = {{"status", "no_accepted_samples"}};
    finish_summary(summary, cfg.out_prefix + "_summary.json", start);
    return 4;
  }
  mean_inv_sqrt_norm /= accepted;

  // Distance bins: every (sample, y) pair at hop distance d is one
  // observation.
  const int max_d = cfg.correlator_max_distance;
  std::vector<std::vector<double>> bins(max_d + 1);
  std::vector<std::vector<double>> site_sum(sites, std::vector<double>());
  std::vector<double> site_means(sites, 0.0);
  for (int y = 0; y < sites; ++y) {
    double acc = 0.0;
    for (int i = 0; i < cfg.samples; ++i) {
      if (records[i].rejected) continue;
      acc += rows[i][y];
      int d = g.dist(x0, y);
      if (d <= max_d) bins[d].push_back(rows[i][y]);
    }
    site_means[y] = acc / accepted;
  }

  std::ofstream csv = open_output(cfg.out_prefix + "_correlator.csv");
  csv << "distance,mean,stderr,count\n";
  std::vector<int> fit_ds;
  std::vector<double> fit_logmean, fit_weight;
  double floor = 10.0 * std::numeric_limits<double>::epsilon() * mean_inv_sqrt_norm;
  for (int d = 0; d <= max_d; ++d) {
    if (bins[d].empty()) continue;
    MeanStderr ms = mean_stderr(bins[d]);
    csv << d << ',' << format_g17(ms.mean) << ',' << format_g17(ms.se) << ',' << ms.count
        << '\n';
    if (d == 0 || !(ms.mean > floor)) continue;  // d=0 and noise bins stay out of the fit
    fit_ds.push_back(d);
    fit_logmean.push_back(std::log(ms.mean));
    double w = ms.se > 0.0 ? (ms.mean / ms.se) * (ms.mean / ms.se)
                           : static_cast<double>(ms.count);
    fit_weight.push_back(w);
  }

  json fit = json::object();
  if (static_cast<int>(fit_ds.size()) < 4) {
    fit["status"] = fit_ds.empty() ? "skipped_all_below_floor" : "refused_too_few_distances";
    fit["distances_used"] = fit_ds.size();
  } else {
    double sw = 0, swx = 0, swy = 0;
    for (std::size_t i = 0; i < fit_ds.size(); ++i) {
      sw += fit_weight[i];
      swx += fit_weight[i] * fit_ds[i];
      swy += fit_weight[i] * fit_logmean[i];
    }
    double xbar = swx / sw, ybar = swy / sw;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < fit_ds.size(); ++i) {
      double dx = fit_ds[i] - xbar;
      sxx += fit_weight[i] * dx * dx;
      sxy += fit_weight[i] * dx * (fit_logmean[i] - ybar);
    }
    double slope = sxy / sxx;
    double intercept = ybar - slope * xbar;
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < fit_ds.size(); ++i) {
      double pred = intercept + slope * fit_ds[i];
      ss_res += fit_weight[i] * (fit_logmean[i] - pred) * (fit_logmean[i] - pred);
      ss_tot += fit_weight[i] * (fit_logmean[i] - ybar) * (fit_logmean[i] - ybar);
    }
    fit["status"] = "ok";
    fit["mu_prime"] = json_number(-slope);
    fit["log_c_prime"] = json_number(intercept);
    fit["r_squared"] = json_number(ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0);
    fit["distances_used"] = fit_ds.size();
    fit["kind"] = beta ? "thermal" : "ground";
  }

  json summary = base_summary(cfg);
  summary["x0"] = x0;
  summary["accepted"] = accepted;
  summary["rejected"] = cfg.samples - accepted;
  summary["fit"] = fit;
  json per_site = json::array();
  for (int y = 0; y < sites; ++y) {
    per_site.push_back(
        {{"site", y}, {"distance", g.dist(x0, y)}, {"mean", json_number(site_means[y])}});
  }
  summary["site_means"] = per_site;
  finish_summary(summary, cfg.out_prefix + "_summary.json", start);
  return 0;
}

int run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.type) {
    case ExperimentType::area_law: return run_area_law(cfg);
    case ExperimentType::thermal_sweep: return run_thermal_sweep(cfg);
    case ExperimentType::correlator: return run_correlator(cfg);
    case ExperimentType::selfcheck: return run_selfcheck(cfg);
  }
  return 2;
}

}  // namespace oscneg
