#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "oscneg/experiments.hpp"
#include "oscneg/fock_oracle.hpp"
#include "oscneg/gaussian.hpp"
#include "oscneg/spectra.hpp"

namespace oscneg {

namespace {

using json = nlohmann::ordered_json;

std::string fail(const std::string& msg) { return msg; }

// Min-plus matrix powers as an independent distance oracle.
std::vector<int> min_plus_distances(const Graph& g) {
  const int n = g.n_vertices();
  const int inf = 1 << 20;
  std::vector<int> d(n * n, inf);
  for (int i = 0; i < n; ++i) d[i * n + i] = 0;
  for (const auto& [u, v] : g.edges()) d[u * n + v] = d[v * n + u] = 1;
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<int> next(d);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          int via = d[i * n + k] + d[k * n + j];
          if (via < next[i * n + j]) {
            next[i * n + j] = via;
            changed = true;
          }
        }
      }
    }
    d.swap(next);
  }
  return d;
}

OscillatorSystem two_site_system(double coupling, std::optional<double> beta,
                                 double k0 = 1.0, double k1 = 1.0) {
  auto graph = std::make_shared<Graph>(Graph::path(2));
  DisorderSample k;
  k.k = {k0, k1};
  ModelParams params{1.0, coupling, 1.0};
  return make_system(graph, Region({0}, 2), k, params, HpSpec::scalar(1.0), beta);
}

// Pipeline negativity with the selfcheck's fault-injection hooks: the
// injections deliberately corrupt one step so the oracle comparison can
// demonstrate it would catch such a defect.
double pipeline_negativity(const OscillatorSystem& sys, const EffectiveHamiltonian& h,
                           SelfcheckInjection inject) {
  CovariancePair cov = covariance_blocks(sys, h);
  SignMatrix p = SignMatrix::for_region(sys.region0);
  if (inject == SelfcheckInjection::wrong_sign_l) p.diag = p.diag.cwiseAbs();
  SymplecticSpectrum spectrum = core_spectrum(transposed_core(cov, p));
  double clip = inject == SelfcheckInjection::clip_tolerance ? 0.05 : kNegativityClipTol;
  return log_negativity(spectrum, clip);
}

}  // namespace

int run_selfcheck(const ExperimentConfig& cfg) {
  struct Check {
    std::string name;
    std::function<std::string()> run;
  };
  std::vector<Check> checks;
  const std::uint64_t seed = cfg.seed;

  checks.push_back({"graph.distance_bfs_vs_minplus", [] {
    for (const Graph& g : {Graph::path(13), Graph::box(2, 4), Graph::bethe(2, 3)}) {
      std::vector<int> ref = min_plus_distances(g);
      for (int x = 0; x < g.n_vertices(); ++x)
        for (int y = 0; y < g.n_vertices(); ++y)
          if (g.dist(x, y) != ref[x * g.n_vertices() + y])
            return fail("BFS distance disagrees with min-plus oracle");
    }
    return std::string();
  }});

  checks.push_back({"graph.boundary_lemma", [] {
    for (double mu : {0.5, 1.0, 2.0}) {
      Graph chain = Graph::path(12);
      double c = c_mu(chain, mu);
      for (int a = 0; a < 12; ++a) {
        for (int b = a; b < 12; ++b) {
          std::vector<int> members;
          for (int v = a; v <= b; ++v) members.push_back(v);
          Region inner(members, 12);
          double lhs = boundary_sum(chain, inner, mu);
          double rhs = c * c * boundary(chain, inner).size();
          if (lhs > rhs) return fail("boundary sum exceeds C_mu^2 |boundary|");
        }
      }
    }
    return std::string();
  }});

  checks.push_back({"graph.degree_vs_cmu", [] {
    for (double mu : {0.5, 1.0, 2.0}) {
      for (const Graph& g : {Graph::path(9), Graph::box(2, 3), Graph::bethe(2, 3)}) {
        double c = c_mu(g, mu);
        if (!(g.max_degree() <= c * std::exp(mu) + 1e-12))
          return fail("N_max <= C_mu e^mu violated");
        if (!(c <= g.n_vertices() + 1e-12)) return fail("C_mu <= n violated");
      }
    }
    return std::string();
  }});

  checks.push_back({"disorder.determinism", [seed] {
    DisorderSpec spec = DisorderSpec::uniform(1.0, seed);
    DisorderSample a = draw(spec, 7, 64);
    DisorderSample b = draw(spec, 7, 64);
    if (a.k != b.k) return fail("repeated draw differs");
    std::vector<std::vector<double>> from_threads(4);
    std::vector<std::thread> pool;
    for (int t = 0; t < 4; ++t)
      pool.emplace_back([&, t] { from_threads[t] = draw(spec, 7, 64).k; });
    for (auto& t : pool) t.join();
    for (const auto& k : from_threads)
      if (k != a.k) return fail("draw differs across threads");
    return std::string();
  }});

  checks.push_back({"disorder.support_and_ks", [seed] {
    DisorderSpec spec = DisorderSpec::uniform(1.0, seed ^ 0x5eedULL);
    const int n = 100000;
    DisorderSample s = draw(spec, 0, n);
    std::vector<double> v = s.k;
    double mean = 0.0;
    for (double x : v) {
      if (!(x > 0.0 && x <= 1.0)) return fail("draw outside (0, k_max]");
      mean += x;
    }
    mean /= n;
    if (std::abs(mean - 0.5) > 0.01) return fail("sample mean off by more than 0.01");
    std::sort(v.begin(), v.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
      double f = v[i];  // analytic CDF of uniform(0,1)
      ks = std::max(ks, std::max(std::abs((i + 1.0) / n - f), std::abs(f - double(i) / n)));
    }
    if (ks >= 0.01) return fail("Kolmogorov-Smirnov distance >= 0.01");
    return std::string();
  }});

  checks.push_back({"oscillator.quadratic_form", [seed] {
    Graph g = Graph::box(2, 3);
    DisorderSpec spec = DisorderSpec::uniform(1.0, seed ^ 0xABCDULL);
    DisorderSample k = draw(spec, 1, g.n_vertices());
    double lambda = 0.7, gd = 1.3;
    Matrix hq = assemble_hq(g, k.k, lambda, gd);
    for (int trial = 0; trial < 100; ++trial) {
      Vector f(g.n_vertices());
      for (int i = 0; i < g.n_vertices(); ++i)
        f[i] = 2.0 * uniform01(seed, 99, trial * 64 + i, 0) - 1.0;
      double direct = f.dot(hq * f);
      double form = 0.0;
      for (const auto& [x, y] : g.edges()) {
        double d = f[y] - f[x];
        form += lambda * d * d;
      }
      for (int x = 0; x < g.n_vertices(); ++x) form += 0.5 * gd * k.k[x] * f[x] * f[x];
      if (std::abs(direct - form) > 1e-12 * std::max(1.0, std::abs(form)))
        return fail("quadratic form identity broken");
    }
    return std::string();
  }});

  checks.push_back({"spectra.semigroup", [seed] {
    Graph g = Graph::path(8);
    DisorderSpec spec = DisorderSpec::uniform(1.0, seed ^ 0x77ULL);
    DisorderSample k = draw(spec, 3, 8);
    Matrix hq = assemble_hq(g, k.k, 1.0, 1.0);
    EffectiveHamiltonian h = effective_h(hq, assemble_hp(g, HpSpec::scalar(1.0)));
    Matrix root = apply(SpectralFunction::sqrt(), h);
    Matrix inv_root = apply(SpectralFunction::inv_sqrt(), h);
    double scale = h.h.norm();
    if ((root * root - h.h).norm() > 1e-9 * scale) return fail("sqrt^2 != h");
    if ((root * inv_root - Matrix::Identity(8, 8)).norm() > 1e-9)
      return fail("sqrt * inv_sqrt != 1");
    Matrix thermal = apply(SpectralFunction::inv_sqrt_coth(60.0 / std::sqrt(h.min_eig)), h);
    if ((thermal - inv_root).norm() > 1e-8 * inv_root.norm())
      return fail("large-beta coth limit misses the ground kernel");
    return std::string();
  }});

  checks.push_back({"spectra.coth", [] {
    for (double x : {0.01, 0.1, 1.0, 5.0, 10.0}) {
      if (std::abs(coth_stable(x) * std::tanh(x) - 1.0) > 1e-14)
        return fail("coth*tanh != 1");
    }
    double x0 = 1e-4;  // both branch formulas, evaluated at the seam itself
    double series = 1.0 / x0 + x0 / 3.0 - x0 * x0 * x0 / 45.0;
    double exact = 1.0 + 2.0 / std::expm1(2.0 * x0);
    if (std::abs(series - exact) > 1e-12 * exact)
      return fail("coth branches disagree at the seam");
    return std::string();
  }});

  const int batch = std::max(8, std::min(cfg.samples, 64));
  checks.push_back({"gaussian.invariants", [seed, batch] {
    auto graph = std::make_shared<Graph>(Graph::path(25));
    Region region({10, 11, 12, 13, 14}, 25);
    DisorderSpec spec = DisorderSpec::uniform(1.0, seed ^ 0x60D5ULL);
    ModelParams params{1.0, 1.0, 1.0};
    for (int s = 0; s < batch; ++s) {
      DisorderSample k = draw(spec, s, 25);
      OscillatorSystem sys = make_system(graph, region, k, params, HpSpec::scalar(1.0));
      EffectiveHamiltonian h = effective_h(sys.hq, sys.hp);

      CovariancePair cov = covariance_blocks(sys, h);
      SymplecticSpectrum pure =
          symplectic_spectrum(cov.m1, cov.m2, SymplecticRoute::block_shortcut);
      for (Eigen::Index i = 0; i < pure.lambdas.size(); ++i)
        if (std::abs(pure.lambdas[i] - 1.0) > 1e-8)
          return fail("ground symplectic eigenvalue differs from 1");

      OscillatorSystem thermal = sys;
      thermal.beta = 1.0;
      CovariancePair tcov = covariance_blocks(thermal, h);
      SymplecticSpectrum tspec =
          symplectic_spectrum(tcov.m1, tcov.m2, SymplecticRoute::block_shortcut);
      if (tspec.lambdas.minCoeff() < 1.0 - 1e-8)
        return fail("thermal symplectic eigenvalue below 1");

      NegativityReport rep = evaluate_sample(sys, h);
      if (!rep.entropy) return fail("ground report lacks entropy");
      if (*rep.entropy > rep.negativity + 1e-8) return fail("entropy exceeds negativity");
      if (rep.negativity > rep.upper_bound_lemma41 + 1e-8)
        return fail("negativity exceeds the deterministic bound");
      NegativityReport trep = evaluate_sample(thermal, h);
      if (trep.negativity > trep.upper_bound_lemma41 + 1e-8)
        return fail("thermal negativity exceeds the deterministic bound");

      SignMatrix p = SignMatrix::for_region(region);
      SignMatrix pc = SignMatrix::for_region(complement(region));
      Matrix core = transposed_core(cov, p);
      Matrix core_c = transposed_core(cov, pc);
      if (!(core.array() == core_c.array()).all())
        return fail("partition swap changes the core");

      double logdet = 0.0;
      SymplecticSpectrum spectrum = core_spectrum(core);
      for (Eigen::Index i = 0; i < spectrum.lambdas.size(); ++i)
        logdet += 2.0 * std::log(spectrum.lambdas[i]);
      if (std::abs(logdet) > 1e-8) return fail("det L deviates from 1");

      Matrix flipped = p.diag.asDiagonal() * cov.m2 * p.diag.asDiagonal();
      SymplecticSpectrum general =
          symplectic_spectrum(cov.m1, flipped, SymplecticRoute::general_jm);
      if ((general.lambdas - spectrum.lambdas).cwiseAbs().maxCoeff() >
          1e-9 * spectrum.lambdas.maxCoeff())
        return fail("Williamson route cross-check failed");
    }
    return std::string();
  }});

  checks.push_back({"gaussian.high_temperature_extinction", [seed] {
    // k in (0.5, 1.5]: gapped h, so tiny beta kills all entanglement.
    DisorderSpec spec;
    spec.kind = DistributionKind::table;
    spec.master_seed = seed ^ 0xF00DULL;
    spec.table.edges = {0.5, 1.5};
    spec.table.density = {0.0, 1.0};
    spec.table.validate_and_build();
    spec.k_max = 1.5;
    auto graph = std::make_shared<Graph>(Graph::path(11));
    Region region({4, 5, 6}, 11);
    ModelParams params{1.0, 1.0, 1.0};
    DisorderSample k = draw(spec, 0, 11);
    for (double kx : k.k)
      if (!(kx > 0.5)) return fail("shifted density produced k <= 0.5");
    OscillatorSystem sys = make_system(graph, region, k, params, HpSpec::scalar(1.0));
    EffectiveHamiltonian h = effective_h(sys.hq, sys.hp);
    OscillatorSystem hot = sys;
    hot.beta = 1e-4 / std::sqrt(h.max_eig);
    NegativityReport rep = evaluate_sample(hot, h);
    if (rep.negativity != 0.0) return fail("entanglement survives at high temperature");
    return std::string();
  }});

  checks.push_back({"oracle.trace_norm", [] {
    for (double lambda : {0.25, 0.5, 0.9, 1.0, 2.0, 5.0}) {
      RhoLambda rho(lambda, 120);
      double expected = lambda < 1.0 ? 1.0 / lambda : 1.0;
      if (std::abs(rho.trace_norm() - expected) > 1e-8)
        return fail("rho_lambda trace norm mismatch");
    }
    return std::string();
  }});

  checks.push_back({"oracle.characteristic_function", [] {
    for (double lambda : {0.5, 2.0}) {
      for (std::complex<double> z : {std::complex<double>(1.0, 0.0),
                                     std::complex<double>(0.5, 0.5),
                                     std::complex<double>(0.0, 1.5)}) {
        if (verify_gaussian_char(lambda, z, 140) > 1e-6)
          return fail("Gaussian characteristic function residual too large");
      }
    }
    return std::string();
  }});

  const SelfcheckInjection inject = cfg.inject;
  checks.push_back({"oracle.negativity_match", [inject] {
    OscillatorSystem sys = two_site_system(1.0, std::nullopt);
    EffectiveHamiltonian h = effective_h(sys.hq, sys.hp);
    double pipeline = pipeline_negativity(sys, h, inject);
    BruteConvergence oracle = brute_negativity_converged(sys, 30, 10, 1e-5);
    if (!oracle.converged) return fail("oracle truncation did not converge");
    if (std::abs(pipeline - oracle.fine.negativity) > 1e-4)
      return fail("pipeline negativity disagrees with the Fock oracle");
    double entropy = entanglement_entropy(covariance_blocks(sys, h), sys.region0);
    if (std::abs(entropy - *oracle.fine.entropy) > 1e-4)
      return fail("pipeline entropy disagrees with the Fock oracle");

    OscillatorSystem thermal = sys;
    thermal.beta = 2.0;
    double tpipe = pipeline_negativity(thermal, h, inject);
    BruteConvergence toracle = brute_negativity_converged(thermal, 30, 10, 1e-5);
    if (!toracle.converged) return fail("thermal oracle truncation did not converge");
    if (std::abs(tpipe - toracle.fine.negativity) > 1e-4)
      return fail("thermal pipeline negativity disagrees with the Fock oracle");
    return std::string();
  }});

  checks.push_back({"oracle.weak_coupling_match", [inject] {
    OscillatorSystem sys = two_site_system(0.02, std::nullopt);
    EffectiveHamiltonian h = effective_h(sys.hq, sys.hp);
    double pipeline = pipeline_negativity(sys, h, inject);
    BruteConvergence oracle = brute_negativity_converged(sys, 30, 10, 1e-5);
    if (!oracle.converged) return fail("oracle truncation did not converge");
    if (std::abs(pipeline - oracle.fine.negativity) > 1e-4)
      return fail("weak-coupling negativity disagrees with the Fock oracle");
    return std::string();
  }});

  checks.push_back({"harness.output_contracts", [seed, &cfg] {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() /
                   ("oscneg_selfcheck_" + std::to_string(seed) + "_" +
                    std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
    fs::create_directories(dir);
    std::string base =
        "[experiment]\ntype = area_law\nseed = " + std::to_string(seed) +
        "\nsamples = 8\nvolumes = 3 5\nout = OUT\n[graph]\nfamily = path\n"
        "[region]\nradius = 1\n[model]\nm = 1\nlambda = 1\ng = 1\n"
        "[state]\nkind = ground\n[disorder]\ndistribution = uniform\nk_max = 1\n";
    auto run_once = [&](const std::string& out, int workers) {
      ConfigFile file = ConfigFile::parse_string(base, "selfcheck");
      file.set("experiment.out", (dir / out).string());
      file.set("experiment.workers", std::to_string(workers));
      ExperimentConfig sub = load_experiment_config(file, ExperimentType::area_law);
      return run_area_law(sub);
    };
    if (run_once("w1", 1) != 0 || run_once("w2", 2) != 0)
      return fail("tiny area-law run failed");
    auto slurp = [](const fs::path& p) {
      std::ifstream in(p, std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      return ss.str();
    };
    if (slurp(dir / "w1_samples.csv") != slurp(dir / "w2_samples.csv"))
      return fail("sample CSV differs across worker counts");
    json s1 = json::parse(slurp(dir / "w1_summary.json"));
    json s2 = json::parse(slurp(dir / "w2_summary.json"));
    s1.erase("timing");
    s2.erase("timing");
    s1["config"].erase("experiment.out");
    s2["config"].erase("experiment.out");
    s1.erase("config_hash");
    s2.erase("config_hash");
    if (s1.dump() != s2.dump()) return fail("summary differs across worker counts");

    // Aggregates must be recomputable from the emitted CSV.
    std::ifstream csv(dir / "w1_samples.csv");
    std::string line;
    std::getline(csv, line);  // header
    std::map<int, std::vector<double>> neg;
    std::map<int, int> accepted, rejected;
    while (std::getline(csv, line)) {
      std::vector<std::string> fields;
      std::istringstream ls(line);
      std::string tok;
      while (std::getline(ls, tok, ',')) fields.push_back(tok);
      if (fields.size() != 8) return fail("sample CSV row has wrong arity");
      int n = std::stoi(fields[1]);
      if (std::stoi(fields[7])) {
        rejected[n]++;
      } else {
        accepted[n]++;
        neg[n].push_back(std::stod(fields[3]));  // stod parses inf/nan fields
      }
    }
    for (const auto& vol : s1["volumes"]) {
      int n = vol["n"].get<int>();
      if (accepted[n] + rejected[n] != 8) return fail("rejection accounting broken");
      if (vol["aggregates"]["accepted"].get<int>() != accepted[n])
        return fail("accepted count mismatch");
      double mean = 0;
      for (double v : neg[n]) mean += v;
      mean /= std::max<std::size_t>(neg[n].size(), 1);
      if (std::abs(mean - vol["aggregates"]["mean_negativity"].get<double>()) > 1e-12)
        return fail("mean recomputed from CSV differs from the summary");
    }
    fs::remove_all(dir);
    return std::string();
  }});

  bool all_ok = true;
  for (const auto& check : checks) {
    std::string msg;
    try {
      msg = check.run();
    } catch (const std::exception& e) {
      msg = std::string("exception: ") + e.what();
    }
    if (msg.empty()) {
      std::cout << "PASS " << check.name << "\n";
    } else {
      std::cout << "FAIL " << check.name << ": " << msg << "\n";
      all_ok = false;
    }
  }
  std::cout << (all_ok ? "selfcheck: all checks passed" : "selfcheck: FAILURES detected")
            << std::endl;
  return all_ok ? 0 : 3;
}

}  // namespace oscneg
