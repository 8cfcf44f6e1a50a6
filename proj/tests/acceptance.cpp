// Acceptance suite: one pass/fail line per criterion. Criteria 5, 6 and 8
// drive the installed CLI end to end; the rest exercise the library
// directly. Exit status is the number of failed criteria.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oscneg/disorder.hpp"
#include "oscneg/experiments.hpp"
#include "oscneg/fock_oracle.hpp"
#include "oscneg/gaussian.hpp"
#include "oscneg/spectra.hpp"

using namespace oscneg;
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using Complex = std::complex<double>;

namespace {

std::string g_cli;
fs::path g_scratch;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("missing file: " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args, const fs::path& cwd) {
  fs::create_directories(cwd);
  std::string cmd = "cd '" + cwd.string() + "' && '" + g_cli + "' " + args;
  int rc = std::system(cmd.c_str());
  if (rc == -1) return -1;
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -2;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::string check(bool ok, const std::string& detail) { return ok ? "" : detail; }

// ---------------------------------------------------------------- criteria

std::string criterion_trace_norm() {
  for (double lambda : {0.25, 0.5, 0.9, 1.0, 2.0, 5.0}) {
    double got = RhoLambda(lambda, 200).trace_norm();
    double expected = std::max(1.0, 1.0 / lambda);
    if (std::abs(got - expected) > 1e-8) {
      return "trace norm at lambda=" + std::to_string(lambda) + " is " +
             std::to_string(got) + ", expected " + std::to_string(expected);
    }
  }
  return "";
}

std::string criterion_char_function() {
  const double pi = std::acos(-1.0);
  for (double lambda : {0.5, 2.0}) {
    for (double r : {1.0, 2.0}) {
      for (int k = 0; k < 4; ++k) {
        double theta = k * pi / 4.0;
        Complex z = r * Complex(std::cos(theta), std::sin(theta));
        double residual = verify_gaussian_char(lambda, z, 200);
        if (residual >= 1e-6) {
          return "characteristic function residual " + std::to_string(residual) +
                 " at lambda=" + std::to_string(lambda) + ", |z|=" + std::to_string(r);
        }
      }
    }
  }
  return "";
}

OscillatorSystem random_system(int sites, std::uint64_t seed, double k_lo, double k_hi,
                               double lam_lo, double lam_hi, Region region,
                               std::optional<double> beta) {
  auto graph = std::make_shared<Graph>(Graph::path(sites));
  DisorderSample k;
  for (int x = 0; x < sites; ++x)
    k.k.push_back(k_lo + (k_hi - k_lo) * uniform01(seed, 1, x, 0));
  double lambda = lam_lo + (lam_hi - lam_lo) * uniform01(seed, 2, 0, 0);
  return make_system(graph, std::move(region), k, ModelParams{1.0, lambda, 1.0},
                     HpSpec::scalar(1.0), beta);
}

std::string criterion_oracle_equivalence() {
  // ten two-site systems
  for (int trial = 0; trial < 10; ++trial) {
    std::uint64_t seed = 100 + trial;
    Region region(trial % 2 == 0 ? std::vector<int>{0} : std::vector<int>{1}, 2);
    OscillatorSystem sys = random_system(2, seed, 0.5, 1.5, 0.3, 1.0, region, {});
    EffectiveHamiltonian h = effective_h(sys.hq, sys.hp);
    NegativityReport pipeline = evaluate_sample(sys, h);

    BruteConvergence oracle = brute_negativity_converged(sys, 20, 10, 1e-5);
    if (!oracle.converged) return "two-site ground oracle did not converge";
    if (std::abs(pipeline.negativity - oracle.fine.negativity) > 1e-4)
      return "two-site negativity mismatch at trial " + std::to_string(trial);
    if (std::abs(*pipeline.entropy - *oracle.fine.entropy) > 1e-4)
      return "two-site entropy mismatch at trial " + std::to_string(trial);

    OscillatorSystem thermal = sys;
    thermal.beta = 1.0 + 2.0 * uniform01(seed, 3, 0, 0);
    NegativityReport tpipe = evaluate_sample(thermal, h);
    BruteConvergence toracle = brute_negativity_converged(thermal, 20, 10, 1e-5);
    if (!toracle.converged) return "two-site thermal oracle did not converge";
    if (std::abs(tpipe.negativity - toracle.fine.negativity) > 1e-4)
      return "two-site thermal negativity mismatch at trial " + std::to_string(trial);
  }
  // three three-site systems; truncation is raised along a dim ladder
  // until two successive runs agree to 1e-5
  auto ladder = [](const OscillatorSystem& sys) -> std::optional<BruteResult> {
    const int dims[] = {8, 12, 16};
    BruteResult prev = brute_negativity(sys, dims[0]);
    for (std::size_t i = 1; i < std::size(dims); ++i) {
      BruteResult cur = brute_negativity(sys, dims[i]);
      double d_entropy = (cur.entropy && prev.entropy)
                             ? std::abs(*cur.entropy - *prev.entropy)
                             : 0.0;
      if (std::abs(cur.negativity - prev.negativity) < 1e-5 && d_entropy < 1e-5)
        return cur;
      prev = cur;
    }
    return std::nullopt;
  };
  const std::vector<std::vector<int>> regions = {{0}, {1}, {0, 2}};
  for (int trial = 0; trial < 3; ++trial) {
    std::uint64_t seed = 300 + trial;
    Region region(regions[trial], 3);
    OscillatorSystem sys = random_system(3, seed, 0.9, 1.7, 0.2, 0.4, region, {});
    EffectiveHamiltonian h = effective_h(sys.hq, sys.hp);
    NegativityReport pipeline = evaluate_sample(sys, h);

    std::optional<BruteResult> oracle = ladder(sys);
    if (!oracle) return "three-site ground oracle did not converge";
    if (std::abs(pipeline.negativity - oracle->negativity) > 1e-4)
      return "three-site negativity mismatch at trial " + std::to_string(trial);
    if (std::abs(*pipeline.entropy - *oracle->entropy) > 1e-4)
      return "three-site entropy mismatch at trial " + std::to_string(trial);

    OscillatorSystem thermal = sys;
    thermal.beta = 3.0;
    NegativityReport tpipe = evaluate_sample(thermal, h);
    std::optional<BruteResult> toracle = ladder(thermal);
    if (!toracle) return "three-site thermal oracle did not converge";
    if (std::abs(tpipe.negativity - toracle->negativity) > 1e-4)
      return "three-site thermal negativity mismatch at trial " + std::to_string(trial);
  }
  return "";
}

std::string criterion_invariant_suite() {
  const int sites = 101;  // chain n = 50
  auto graph = std::make_shared<Graph>(Graph::path(sites));
  Region region({48, 49, 50, 51, 52}, sites);
  DisorderSpec dspec = DisorderSpec::uniform(1.0, 424242);
  ModelParams params{1.0, 1.0, 1.0};
  for (int sample = 0; sample < 200; ++sample) {
    DisorderSample k = draw(dspec, sample, sites);
    OscillatorSystem sys = make_system(graph, region, k, params, HpSpec::scalar(1.0));
    EffectiveHamiltonian h = effective_h(sys.hq, sys.hp);
    CovariancePair cov = covariance_blocks(sys, h);

    Vector pure =
        symplectic_spectrum(cov.m1, cov.m2, SymplecticRoute::block_shortcut).lambdas;
    if ((pure.array() - 1.0).abs().maxCoeff() > 1e-8)
      return "pure-state symplectic eigenvalue deviates at sample " +
             std::to_string(sample);

    OscillatorSystem warm = sys;
    warm.beta = 1.0;
    CovariancePair wcov = covariance_blocks(warm, h);
    if (symplectic_spectrum(wcov.m1, wcov.m2, SymplecticRoute::block_shortcut)
            .lambdas.minCoeff() < 1.0 - 1e-8)
      return "thermal symplectic eigenvalue below 1 at sample " + std::to_string(sample);

    NegativityReport rep = evaluate_sample(sys, h);
    if (!rep.entropy || *rep.entropy > rep.negativity + 1e-8)
      return "entropy exceeds negativity at sample " + std::to_string(sample);
    if (rep.negativity > rep.upper_bound_lemma41 + 1e-8)
      return "ground bound violated at sample " + std::to_string(sample);
    NegativityReport wrep = evaluate_sample(warm, h);
    if (wrep.negativity > wrep.upper_bound_lemma41 + 1e-8)
      return "thermal bound violated at sample " + std::to_string(sample);

    OscillatorSystem swapped = sys;
    swapped.region0 = complement(region);
    if (evaluate_sample(swapped, h).negativity != rep.negativity)
      return "partition symmetry broken at sample " + std::to_string(sample);

    SignMatrix p = SignMatrix::for_region(region);
    Matrix core = transposed_core(cov, p);
    SymplecticSpectrum spectrum = core_spectrum(core);
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < spectrum.lambdas.size(); ++i)
      logdet += 2.0 * std::log(spectrum.lambdas[i]);
    if (std::abs(logdet) > 1e-8)
      return "det L deviates from 1 at sample " + std::to_string(sample);

    Matrix flipped = p.diag.asDiagonal() * cov.m2 * p.diag.asDiagonal();
    Vector general =
        symplectic_spectrum(cov.m1, flipped, SymplecticRoute::general_jm).lambdas;
    if ((general - spectrum.lambdas).cwiseAbs().maxCoeff() >
        1e-9 * spectrum.lambdas.maxCoeff())
      return "route cross-check failed at sample " + std::to_string(sample);
  }
  return "";
}

std::string area_law_config(const std::string& state_block) {
  return
      "[experiment]\ntype = area_law\nseed = 20130815\nsamples = 200\n"
      "volumes = 20 40 80 160\nout = run\n"
      "[graph]\nfamily = path\n"
      "[region]\nradius = 2\n"
      "[model]\nm = 1\nlambda = 1\ng = 1\n" +
      state_block +
      "[disorder]\ndistribution = uniform\nk_max = 1\n";
}

std::string criterion_area_law_plateau() {
  struct Case {
    std::string name;
    std::string state;
  };
  const std::vector<Case> cases = {
      {"ground", "[state]\nkind = ground\n"},
      {"beta1", "[state]\nkind = thermal\nbeta = 1\n"},
      {"beta10", "[state]\nkind = thermal\nbeta = 10\n"},
  };
  for (const Case& c : cases) {
    fs::path dir = g_scratch / ("area_" + c.name);
    fs::create_directories(dir);
    write_file(dir / "cfg.ini", area_law_config(c.state));
    int rc = run_cli("area-law --config cfg.ini --workers 2", dir);
    if (rc != 0) return "CLI area-law (" + c.name + ") exited with " + std::to_string(rc);
    json summary = json::parse(slurp(dir / "run_summary.json"));
    double m80 = 0, s80 = 0, m160 = 0, s160 = 0;
    for (const auto& vol : summary["volumes"]) {
      if (vol["n"] == 80) {
        m80 = vol["aggregates"]["mean_negativity"].get<double>();
        s80 = vol["aggregates"]["stderr_negativity"].get<double>();
      }
      if (vol["n"] == 160) {
        m160 = vol["aggregates"]["mean_negativity"].get<double>();
        s160 = vol["aggregates"]["stderr_negativity"].get<double>();
      }
    }
    double joint = 2.0 * std::hypot(s80, s160);
    if (std::abs(m160 - m80) > joint) {
      return c.name + ": |mean(160)-mean(80)| = " + std::to_string(std::abs(m160 - m80)) +
             " exceeds 2 joint stderr = " + std::to_string(joint);
    }
  }
  return "";
}

std::string criterion_correlator_decay() {
  struct Case {
    std::string name;
    std::string state;
  };
  const std::vector<Case> cases = {
      {"phi1", "[state]\nkind = ground\n"},
      {"phi2", "[state]\nkind = thermal\nbeta = 1\n"},
  };
  for (const Case& c : cases) {
    fs::path dir = g_scratch / ("corr_" + c.name);
    fs::create_directories(dir);
    write_file(dir / "cfg.ini",
               "[experiment]\ntype = correlator\nseed = 7151\nsamples = 500\n"
               "volumes = 100\nout = run\n"
               "[graph]\nfamily = path\n"
               "[model]\nm = 1\nlambda = 1\ng = 1\n" +
                   c.state +
                   "[disorder]\ndistribution = uniform\nk_max = 1\n"
                   "[correlator]\nmax_distance = 15\n");
    int rc = run_cli("correlator --config cfg.ini --workers 2", dir);
    if (rc != 0) return "CLI correlator (" + c.name + ") exited with " + std::to_string(rc);
    json fit = json::parse(slurp(dir / "run_summary.json"))["fit"];
    if (fit["status"] != "ok") return c.name + ": fit status " + fit["status"].dump();
    double mu = fit["mu_prime"].get<double>();
    double r2 = fit["r_squared"].get<double>();
    if (!(mu > 0.0)) return c.name + ": fitted mu' = " + std::to_string(mu);
    if (!(r2 > 0.9)) return c.name + ": R^2 = " + std::to_string(r2);
  }
  return "";
}

std::string criterion_boundary_lemma() {
  for (double mu : {0.5, 1.0, 2.0}) {
    {  // every interval of a 12-site chain
      Graph chain = Graph::path(12);
      double c = c_mu(chain, mu);
      for (int a = 0; a < 12; ++a) {
        for (int b = a; b < 12; ++b) {
          std::vector<int> members;
          for (int v = a; v <= b; ++v) members.push_back(v);
          Region inner(members, 12);
          if (boundary_sum(chain, inner, mu) > c * c * boundary(chain, inner).size())
            return "chain interval violates the lemma";
        }
      }
    }
    {  // every 3x3 sub-box of a 6x6 box
      Graph box = Graph::box(2, 6);
      double c = c_mu(box, mu);
      for (int r0 = 0; r0 + 3 <= 6; ++r0) {
        for (int c0 = 0; c0 + 3 <= 6; ++c0) {
          std::vector<int> members;
          for (int r = r0; r < r0 + 3; ++r)
            for (int col = c0; col < c0 + 3; ++col) members.push_back(r * 6 + col);
          Region inner(members, 36);
          if (boundary_sum(box, inner, mu) > c * c * boundary(box, inner).size())
            return "box sub-region violates the lemma";
        }
      }
    }
    {  // depth-1 subtrees of bethe(2,3)
      Graph tree = Graph::bethe(2, 3);
      double c = c_mu(tree, mu);
      for (int v = 0; v < tree.n_vertices(); ++v) {
        std::vector<int> members = {v};
        for (int w : tree.neighbors(v))
          if (tree.dist(0, w) == tree.dist(0, v) + 1) members.push_back(w);
        if (members.size() == 1) continue;  // leaf
        Region inner(members, tree.n_vertices());
        if (boundary_sum(tree, inner, mu) > c * c * boundary(tree, inner).size())
          return "bethe subtree violates the lemma";
      }
    }
  }
  return "";
}

std::string criterion_determinism() {
  const std::string cfg =
      "[experiment]\ntype = area_law\nseed = 99\nsamples = 50\nvolumes = 10 20\n"
      "out = run\n[graph]\nfamily = path\n[region]\nradius = 2\n"
      "[model]\nm = 1\nlambda = 1\ng = 1\n"
      "[disorder]\ndistribution = uniform\nk_max = 1\n";
  fs::path d1 = g_scratch / "det_w1";
  fs::path d4 = g_scratch / "det_w4";
  fs::create_directories(d1);
  fs::create_directories(d4);
  write_file(d1 / "cfg.ini", cfg);
  write_file(d4 / "cfg.ini", cfg);
  if (run_cli("area-law --config cfg.ini --workers 1", d1) != 0)
    return "workers=1 run failed";
  if (run_cli("area-law --config cfg.ini --workers 4", d4) != 0)
    return "workers=4 run failed";
  if (slurp(d1 / "run_samples.csv") != slurp(d4 / "run_samples.csv"))
    return "sample CSV differs between worker counts";
  // The summary carries a wall-clock timing block; everything else must
  // match byte for byte, so compare the serialization with timing removed.
  json s1 = json::parse(slurp(d1 / "run_summary.json"));
  json s4 = json::parse(slurp(d4 / "run_summary.json"));
  s1.erase("timing");
  s4.erase("timing");
  if (s1.dump(2) != s4.dump(2)) return "summary differs between worker counts";
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <path-to-oscneg-cli> <scratch-dir>\n";
    return 64;
  }
  g_cli = fs::absolute(argv[1]).string();
  g_scratch = fs::absolute(argv[2]);
  fs::create_directories(g_scratch);

  struct Criterion {
    int id;
    std::string title;
    std::function<std::string()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "single-mode trace norm max(1, 1/lambda)", criterion_trace_norm},
      {2, "Gaussian characteristic function residual < 1e-6", criterion_char_function},
      {3, "symplectic pipeline matches the Fock oracle", criterion_oracle_equivalence},
      {4, "invariant suite on 200 random chain samples", criterion_invariant_suite},
      {5, "area-law plateau on the chain (ground, beta 1, beta 10)",
       criterion_area_law_plateau},
      {6, "correlator decay fit (mu' > 0, R^2 > 0.9)", criterion_correlator_decay},
      {7, "boundary lemma, exhaustive exact check", criterion_boundary_lemma},
      {8, "byte-identical outputs across worker counts", criterion_determinism},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    auto start = std::chrono::steady_clock::now();
    std::string detail;
    try {
      detail = criterion.run();
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char stamp[32];
    std::snprintf(stamp, sizeof stamp, "%.1fs", seconds);
    if (detail.empty()) {
      std::cout << "PASS criterion " << criterion.id << " (" << criterion.title << ") ["
                << stamp << "]\n";
    } else {
      std::cout << "FAIL criterion " << criterion.id << " (" << criterion.title
                << "): " << detail << " [" << stamp << "]\n";
      ++failures;
    }
    std::cout.flush();
  }
  return failures;
}
