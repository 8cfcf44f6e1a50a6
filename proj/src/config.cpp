#include "oscneg/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace oscneg {

namespace {

std::string trim(const std::string& s) {
  auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace

ConfigFile ConfigFile::parse_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw config_error("cannot open config file: " + file.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str(), file.string());
}

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& origin) {
  ConfigFile cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto where = [&] { return origin + ":" + std::to_string(lineno) + ": "; };
    if (line.front() == '[') {
      if (line.back() != ']') throw config_error(where() + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw config_error(where() + "empty section name");
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw config_error(where() + "expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw config_error(where() + "empty key");
    if (section.empty()) throw config_error(where() + "key appears before any [section]");
    std::string full = section + "." + key;
    if (cfg.entries_.count(full)) throw config_error(where() + "duplicate key " + full);
    cfg.entries_[full] = value;
  }
  return cfg;
}

bool ConfigFile::has(const std::string& key) const { return entries_.count(key) > 0; }

void ConfigFile::set(const std::string& key, const std::string& value) {
  entries_[key] = value;
}

void ConfigFile::erase(const std::string& key) {
  entries_.erase(key);
  consumed_.erase(key);
}

std::string ConfigFile::require(const std::string& key) {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw config_error(origin_ + ": missing required key " + key);
  consumed_.insert(key);
  return it->second;
}

std::string ConfigFile::get_string(const std::string& key) { return require(key); }

std::string ConfigFile::get_string(const std::string& key, const std::string& fallback) {
  if (!has(key)) return fallback;
  return require(key);
}

double ConfigFile::get_double(const std::string& key) {
  std::string raw = require(key);
  try {
    std::size_t used = 0;
    double v = std::stod(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw config_error(origin_ + ": key " + key + " is not a number: '" + raw + "'");
  }
}

double ConfigFile::get_double(const std::string& key, double fallback) {
  if (!has(key)) return fallback;
  return get_double(key);
}

std::int64_t ConfigFile::get_int(const std::string& key) {
  std::string raw = require(key);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
  if (ec != std::errc() || ptr != raw.data() + raw.size())
    throw config_error(origin_ + ": key " + key + " is not an integer: '" + raw + "'");
  return v;
}

std::int64_t ConfigFile::get_int(const std::string& key, std::int64_t fallback) {
  if (!has(key)) return fallback;
  return get_int(key);
}

std::uint64_t ConfigFile::get_uint(const std::string& key, std::uint64_t fallback) {
  if (!has(key)) return fallback;
  std::string raw = require(key);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
  if (ec != std::errc() || ptr != raw.data() + raw.size())
    throw config_error(origin_ + ": key " + key + " is not an unsigned integer: '" + raw + "'");
  return v;
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) {
  if (!has(key)) return fallback;
  std::string raw = require(key);
  std::string low;
  for (char c : raw) low.push_back(static_cast<char>(std::tolower(c)));
  if (low == "true" || low == "1" || low == "yes" || low == "on") return true;
  if (low == "false" || low == "0" || low == "no" || low == "off") return false;
  throw config_error(origin_ + ": key " + key + " is not a boolean: '" + raw + "'");
}

std::vector<double> ConfigFile::get_double_list(const std::string& key) {
  std::string raw = require(key);
  std::vector<double> out;
  for (const std::string& tok : split_ws(raw)) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw config_error(origin_ + ": key " + key + " has a non-numeric entry '" + tok + "'");
    }
  }
  return out;
}

std::vector<int> ConfigFile::get_int_list(const std::string& key) {
  std::string raw = require(key);
  std::vector<int> out;
  for (const std::string& tok : split_ws(raw)) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      throw config_error(origin_ + ": key " + key + " has a non-integer entry '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

void ConfigFile::ensure_consumed() const {
  std::vector<std::string> unknown;
  for (const auto& [key, value] : entries_) {
    if (!consumed_.count(key)) unknown.push_back(key);
  }
  if (!unknown.empty()) {
    std::string msg = origin_ + ": unknown key(s):";
    for (const auto& k : unknown) msg += " " + k;
    throw config_error(msg);
  }
}

std::string ConfigFile::canonical_text() const {
  std::string out;
  for (const auto& [key, value] : entries_) {
    out += key;
    out += " = ";
    out += value;
    out += "\n";
  }
  return out;
}

std::string ConfigFile::hash_hex() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_text()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

std::string to_string(ExperimentType t) {
  switch (t) {
    case ExperimentType::area_law: return "area_law";
    case ExperimentType::thermal_sweep: return "thermal_sweep";
    case ExperimentType::correlator: return "correlator";
    case ExperimentType::selfcheck: return "selfcheck";
  }
  return "?";
}

DisorderSpec ExperimentConfig::disorder_spec() const {
  if (disorder_kind == DistributionKind::uniform) return DisorderSpec::uniform(k_max, seed);
  return DisorderSpec::from_density_file(density_file, seed);
}

namespace {

GraphFamily parse_family(const std::string& raw) {
  if (raw == "path") return GraphFamily::path;
  if (raw == "box") return GraphFamily::box;
  if (raw == "bethe") return GraphFamily::bethe;
  if (raw == "custom") return GraphFamily::custom;
  throw config_error("unknown graph family '" + raw + "'");
}

}  // namespace

ExperimentConfig load_experiment_config(ConfigFile& file, ExperimentType type,
                                        const CliOverrides& overrides) {
  if (overrides.seed) file.set("experiment.seed", std::to_string(*overrides.seed));
  if (overrides.samples) file.set("experiment.samples", std::to_string(*overrides.samples));
  if (overrides.out) file.set("experiment.out", *overrides.out);
  if (overrides.workers) file.set("experiment.workers", std::to_string(*overrides.workers));

  ExperimentConfig cfg;
  cfg.type = type;

  std::string declared = file.get_string("experiment.type", to_string(type));
  if (declared != to_string(type))
    throw config_error("config declares experiment.type = " + declared +
                       " but the requested subcommand is " + to_string(type));

  cfg.seed = file.get_uint("experiment.seed", 0);
  cfg.samples = static_cast<int>(file.get_int("experiment.samples", 1));
  if (cfg.samples < 1) throw config_error("experiment.samples must be >= 1");
  cfg.workers = static_cast<int>(file.get_int("experiment.workers", 0));
  if (cfg.workers < 0) throw config_error("experiment.workers must be >= 0");
  // The worker count cannot influence results, so it is not part of the
  // experiment identity: keep it out of the config hash and echo.
  file.erase("experiment.workers");
  cfg.out_prefix = file.get_string("experiment.out", "oscneg_out");

  cfg.graph.family = parse_family(file.get_string("graph.family", "path"));
  cfg.graph.nu = static_cast<int>(file.get_int("graph.nu", 1));
  cfg.graph.branching = static_cast<int>(file.get_int("graph.branching", 2));
  cfg.graph.regular_root = file.get_bool("graph.regular_root", true);
  cfg.graph.edge_file = file.get_string("graph.edge_file", "");
  if (cfg.graph.family == GraphFamily::custom && cfg.graph.edge_file.empty())
    throw config_error("custom graphs need graph.edge_file");
  cfg.graph.cap = static_cast<int>(file.get_int("graph.cap", Graph::default_vertex_cap));
  if (cfg.graph.cap < 1 || cfg.graph.cap > Graph::default_vertex_cap)
    throw config_error("graph.cap must be in [1, " +
                       std::to_string(Graph::default_vertex_cap) + "]");

  if (file.has("experiment.volumes")) {
    cfg.volumes = file.get_int_list("experiment.volumes");
  } else if (cfg.graph.family != GraphFamily::custom &&
             type != ExperimentType::selfcheck) {
    throw config_error("experiment.volumes is required for generated graph families");
  }
  for (int n : cfg.volumes) {
    if (n < 1) throw config_error("volume parameters must be >= 1");
  }
  if (type == ExperimentType::thermal_sweep || type == ExperimentType::correlator) {
    if (cfg.graph.family != GraphFamily::custom && cfg.volumes.size() != 1)
      throw config_error(to_string(type) + " needs exactly one volume");
  }

  if (file.has("region.sites")) {
    cfg.region.sites = file.get_int_list("region.sites");
    if (cfg.region.sites.empty()) throw config_error("region.sites must be non-empty");
  } else if (file.has("region.radius")) {
    int r = static_cast<int>(file.get_int("region.radius"));
    if (r < 0) throw config_error("region.radius must be >= 0");
    cfg.region.radius = r;
  } else if (type != ExperimentType::selfcheck && type != ExperimentType::correlator) {
    throw config_error("a region is required: set region.radius or region.sites");
  }
  if (cfg.graph.family == GraphFamily::custom && !cfg.region.radius &&
      cfg.region.sites.empty() && type == ExperimentType::area_law)
    throw config_error("custom graphs need region.sites");
  if (cfg.region.radius && !cfg.volumes.empty()) {
    int min_n = *std::min_element(cfg.volumes.begin(), cfg.volumes.end());
    if (*cfg.region.radius >= min_n)
      throw config_error("region.radius must be smaller than the smallest volume");
  }

  cfg.model.m = file.get_double("model.m", 1.0);
  cfg.model.lambda = file.get_double("model.lambda", 1.0);
  cfg.model.g = file.get_double("model.g", 1.0);
  if (!(cfg.model.m > 0) || !(cfg.model.lambda >= 0) || !(cfg.model.g > 0))
    throw config_error("model parameters need m > 0, lambda >= 0, g > 0");
  std::string hp_kind = file.get_string("model.hp", "scalar");
  if (hp_kind == "scalar") {
    cfg.hp = HpSpec::scalar(cfg.model.m);
  } else if (hp_kind == "band") {
    cfg.hp = HpSpec::band(file.get_double("model.hp_c", 1.0),
                          file.get_double("model.hp_delta", 0.0));
  } else {
    throw config_error("model.hp must be 'scalar' or 'band'");
  }
  cfg.assumption_c = file.get_double("model.assumption_c", 1e8);
  if (!(cfg.assumption_c > 0)) throw config_error("model.assumption_c must be positive");

  std::string kind = file.get_string("state.kind", "ground");
  if (kind == "ground") {
    cfg.state.kind = StateKind::ground;
  } else if (kind == "thermal") {
    cfg.state.kind = StateKind::thermal;
  } else {
    throw config_error("state.kind must be 'ground' or 'thermal'");
  }
  if (type == ExperimentType::thermal_sweep) {
    if (!file.has("state.betas")) throw config_error("thermal_sweep needs state.betas");
    cfg.state.betas = file.get_double_list("state.betas");
    if (cfg.state.betas.empty()) throw config_error("state.betas must be non-empty");
    for (double b : cfg.state.betas) {
      if (!(b > 0)) throw config_error("state.betas entries must be positive");
    }
  } else if (cfg.state.kind == StateKind::thermal) {
    cfg.state.beta = file.get_double("state.beta");
    if (!(cfg.state.beta > 0)) throw config_error("state.beta must be positive");
  }

  std::string dist = file.get_string("disorder.distribution", "uniform");
  if (dist == "uniform") {
    cfg.disorder_kind = DistributionKind::uniform;
    cfg.k_max = file.get_double("disorder.k_max", 1.0);
    if (!(cfg.k_max > 0)) throw config_error("disorder.k_max must be positive");
  } else if (dist == "table") {
    cfg.disorder_kind = DistributionKind::table;
    cfg.density_file = file.get_string("disorder.density_file");
  } else {
    throw config_error("disorder.distribution must be 'uniform' or 'table'");
  }

  if (type == ExperimentType::correlator) {
    if (cfg.graph.family != GraphFamily::path && cfg.graph.family != GraphFamily::box)
      throw config_error("correlator runs need a path or box graph");
    cfg.correlator_max_distance =
        static_cast<int>(file.get_int("correlator.max_distance", 15));
    if (cfg.correlator_max_distance < 1)
      throw config_error("correlator.max_distance must be >= 1");
    if (cfg.graph.family == GraphFamily::path && !cfg.volumes.empty() &&
        cfg.volumes.front() < 4)
      throw config_error("correlator runs on a chain need volume n >= 4 for a fit");
  }

  std::string inject = file.get_string("selfcheck.inject", "none");
  if (inject == "none") {
    cfg.inject = SelfcheckInjection::none;
  } else if (inject == "clip_tolerance") {
    cfg.inject = SelfcheckInjection::clip_tolerance;
  } else if (inject == "wrong_sign_l") {
    cfg.inject = SelfcheckInjection::wrong_sign_l;
  } else {
    throw config_error("selfcheck.inject must be none, clip_tolerance or wrong_sign_l");
  }

  file.ensure_consumed();
  cfg.config_hash = file.hash_hex();
  cfg.echo = file.entries();

  // Fail early when the density table is malformed.
  if (cfg.disorder_kind == DistributionKind::table) {
    try {
      cfg.disorder_spec();
    } catch (const std::exception& e) {
      throw config_error(e.what());
    }
  }
  return cfg;
}

}  // namespace oscneg
