#include "harness/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace superrad::harness {

namespace {

enum class Kind { Int, Real, RealList, IntList, Text, Choice };

struct KeySpec {
  Kind kind;
  std::vector<std::string> choices = {};
  bool hashed = true;
};

const std::map<std::string, KeySpec>& schema() {
  static const std::map<std::string, KeySpec> s = {
      {"experiment.id", {Kind::Choice, {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11",
                                        "fig12", "table1", "table2", "custom"}}},
      {"experiment.output", {Kind::Text, {}, false}},
      {"system.n_atoms", {Kind::Int}},
      {"system.gamma_over_g", {Kind::Real}},
      {"system.n_fock", {Kind::Int}},
      {"system.topology", {Kind::Choice, {"common", "independent"}}},
      {"state.family", {Kind::Choice, {"dicke", "dephased", "mixture", "factorized", "ground"}}},
      {"state.j", {Kind::Real}},
      {"state.m", {Kind::Real}},
      {"state.lambda", {Kind::Real}},
      {"state.weights", {Kind::RealList}},
      {"state.rho_ee", {Kind::Real}},
      {"state.rho_eg_re", {Kind::Real}},
      {"state.rho_eg_im", {Kind::Real}},
      {"window.duration", {Kind::Real}},
      {"window.horizon", {Kind::Real}},
      {"window.grid_points", {Kind::Int}},
      {"window.plateau_start", {Kind::Real}},
      {"window.plateau_end", {Kind::Real}},
      {"window.sample_dt", {Kind::Real}},
      {"window.diagonal_only", {Kind::Choice, {"auto", "true", "false"}}},
      {"sweep.n_atoms", {Kind::IntList}},
      {"sweep.gamma_over_g", {Kind::RealList}},
      {"sweep.lambdas", {Kind::RealList}},
      {"sweep.resolution", {Kind::Int}},
      {"integrator.rel_tol", {Kind::Real}},
      {"integrator.max_step", {Kind::Real}},
  };
  return s;
}

const std::map<std::string, std::string> kCommonDefaults = {
    {"system.n_atoms", "2"},          {"system.gamma_over_g", "0"},    {"system.n_fock", "0"},
    {"system.topology", "common"},    {"state.family", "dicke"},       {"state.j", "1"},
    {"state.m", "0"},                 {"state.lambda", "1"},           {"state.rho_ee", "0.5"},
    {"state.rho_eg_re", "0"},         {"state.rho_eg_im", "0"},        {"window.duration", "0.01"},
    {"window.grid_points", "21"},     {"window.sample_dt", "0"},       {"window.diagonal_only", "auto"},
    {"integrator.rel_tol", "1e-9"},   {"integrator.max_step", "0"},
};

const std::map<std::string, std::map<std::string, std::string>>& experiment_defaults() {
  static const std::map<std::string, std::map<std::string, std::string>> d = {
      {"fig2", {{"sweep.n_atoms", "2"}, {"sweep.gamma_over_g", "0,1,10"}, {"sweep.resolution", "21"}}},
      {"fig3", {{"sweep.n_atoms", "2,6"}, {"sweep.gamma_over_g", "0,1,10"}, {"sweep.resolution", "21"}}},
      {"fig4", {{"sweep.n_atoms", "1..15"}}},
      {"fig5", {{"sweep.n_atoms", "1..15"}}},
      {"fig6", {{"sweep.n_atoms", "1,2,6"}, {"sweep.resolution", "21"}}},
      {"fig7", {{"sweep.n_atoms", "2,3,6"}, {"sweep.resolution", "21"}}},
      {"fig8",
       {{"system.n_atoms", "4"}, {"system.gamma_over_g", "1000"}, {"state.j", "2"}, {"state.m", "0"},
        {"window.duration", "0.2"}, {"window.horizon", "0.2"}, {"window.grid_points", "41"},
        {"window.plateau_start", "0.05"}, {"window.plateau_end", "0.2"}, {"window.sample_dt", "0.0001"},
        {"window.diagonal_only", "false"}}},
      {"fig9",
       {{"system.n_atoms", "4"}, {"system.gamma_over_g", "0.5"}, {"state.j", "2"}, {"state.m", "0"},
        {"window.duration", "10"}, {"window.horizon", "20"}, {"window.grid_points", "41"},
        {"window.sample_dt", "0.01"}}},
      {"fig10",
       {{"sweep.n_atoms", "1..4"}, {"system.gamma_over_g", "0.5"}, {"window.duration", "10"},
        {"window.horizon", "20"}, {"window.grid_points", "21"}, {"window.sample_dt", "0.01"}}},
      {"fig11",
       {{"sweep.n_atoms", "2"}, {"system.gamma_over_g", "0.5"}, {"sweep.resolution", "6"}, {"window.duration", "10"},
        {"window.horizon", "20"}, {"window.grid_points", "21"}, {"window.sample_dt", "0.01"}}},
      {"fig12",
       {{"sweep.n_atoms", "2"}, {"system.gamma_over_g", "0.5"}, {"sweep.resolution", "6"}, {"window.duration", "10"},
        {"window.horizon", "20"}, {"window.grid_points", "21"}, {"window.sample_dt", "0.01"}}},
      {"table1", {{"sweep.n_atoms", "1..4"}, {"sweep.lambdas", "0,0.5,1"}}},
      {"table2", {{"sweep.n_atoms", "1,2,3"}, {"sweep.resolution", "5"}}},
      {"custom", {}},
  };
  return d;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_real(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ConfigError(key + ": expected a real number, got '" + text + "'");
  }
  return v;
}

long parse_integer(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  long v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  }
  return v;
}

// Canonical form of a raw value according to the schema.
std::string canonicalize(const std::string& key, const std::string& raw) {
  const auto it = schema().find(key);
  if (it == schema().end()) throw ConfigError("unknown key '" + key + "'");
  const KeySpec& spec = it->second;
  switch (spec.kind) {
    case Kind::Int:
      return std::to_string(parse_integer(key, raw));
    case Kind::Real:
      return format_real(parse_real(key, raw));
    case Kind::RealList: {
      std::string out;
      for (const auto& item : split(raw, ',')) {
        if (!out.empty()) out += ',';
        out += format_real(parse_real(key, item));
      }
      if (out.empty()) throw ConfigError(key + ": empty list");
      return out;
    }
    case Kind::IntList: {
      std::string out;
      for (const auto& item : split(raw, ',')) {
        const auto dots = item.find("..");
        long lo, hi;
        if (dots == std::string::npos) {
          lo = hi = parse_integer(key, item);
        } else {
          lo = parse_integer(key, item.substr(0, dots));
          hi = parse_integer(key, item.substr(dots + 2));
          if (hi < lo) throw ConfigError(key + ": descending range '" + item + "'");
        }
        for (long v = lo; v <= hi; ++v) {
          if (!out.empty()) out += ',';
          out += std::to_string(v);
        }
      }
      if (out.empty()) throw ConfigError(key + ": empty list");
      return out;
    }
    case Kind::Text:
      return trim(raw);
    case Kind::Choice: {
      const std::string v = lower(trim(raw));
      if (std::find(spec.choices.begin(), spec.choices.end(), v) == spec.choices.end()) {
        std::string allowed;
        for (const auto& c : spec.choices) allowed += (allowed.empty() ? "" : "|") + c;
        throw ConfigError(key + ": '" + raw + "' is not one of " + allowed);
      }
      return v;
    }
  }
  return raw;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

}  // namespace

const std::vector<ExperimentInfo>& experiment_catalog() {
  static const std::vector<ExperimentInfo> c = {
      {"fig2", "Choi-matrix error of the quadratic map vs gt (N, gamma/g sweep)"},
      {"fig3", "excitation-number error of the quadratic map vs gt, fully excited atoms"},
      {"fig4", "early-time normalized N_M and N_P for Dicke states |J,M>"},
      {"fig5", "early-time degree of superradiance S and N_M/N_M_ind for Dicke states"},
      {"fig6", "early-time normalized N_M and N_P for factorized states over (rho_ee, |rho_eg|)"},
      {"fig7", "early-time S and N_M/N_M_ind for factorized states over (rho_ee, |rho_eg|)"},
      {"fig8", "near-Markovian example: N_ex, N_P trajectories and D, dN_ex surfaces"},
      {"fig9", "strongly non-Markovian example: N_ex, R, N_P trajectories and D, dN_ex surfaces"},
      {"fig10", "strongly non-Markovian N_M, R_max, S, N_M/N_M_ind for Dicke states"},
      {"fig11", "strongly non-Markovian N_M and R_max for factorized states"},
      {"fig12", "strongly non-Markovian S and N_M/N_M_ind for factorized states"},
      {"table1", "dephased Dicke characteristics: early-time vs early-stage Markovian"},
      {"table2", "factorized-state characteristics: early-time vs early-stage Markovian"},
      {"custom", "one system and state: memory measure, radiation report, trajectory, surfaces"},
  };
  return c;
}

ExperimentConfig ExperimentConfig::defaults(const std::string& id) {
  const auto& all = experiment_defaults();
  const auto it = all.find(id);
  if (it == all.end()) throw ConfigError("experiment.id: unknown experiment '" + id + "'");
  ExperimentConfig cfg;
  cfg.id_ = id;
  cfg.values_["experiment.id"] = id;
  for (const auto& [k, v] : kCommonDefaults) cfg.values_[k] = canonicalize(k, v);
  for (const auto& [k, v] : it->second) cfg.values_[k] = canonicalize(k, v);
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text, const std::string& source) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(source + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  std::map<std::string, std::string> raw;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError(source + ": key '" + section + "' must belong to a section");
    for (const auto& [key, value] : body) {
      const std::string full = lower(section) + "." + lower(key);
      if (!schema().contains(full)) {
        const bool known_section = std::any_of(schema().begin(), schema().end(), [&](const auto& kv) {
          return kv.first.rfind(lower(section) + ".", 0) == 0;
        });
        throw ConfigError(source + ": " + (known_section ? "unknown key '" + full + "'" : "unknown section [" + section + "]"));
      }
      raw[full] = value.get_value<std::string>();
    }
  }
  if (!raw.contains("experiment.id")) throw ConfigError(source + ": missing required key experiment.id");
  ExperimentConfig cfg = defaults(canonicalize("experiment.id", raw.at("experiment.id")));
  for (const auto& [k, v] : raw) {
    try {
      cfg.values_[k] = canonicalize(k, v);
    } catch (const ConfigError& e) {
      throw ConfigError(source + ": " + e.what());
    }
  }
  try {
    cfg.validate();
  } catch (const UsageError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key == "experiment.id") throw ConfigError("experiment.id cannot be overridden");
  values_[key] = canonicalize(key, value);
  validate();
}

std::string ExperimentConfig::canonical_text() const {
  std::string out;
  for (const auto& [k, v] : values_) {
    if (!schema().at(k).hashed) continue;
    out += k + "=" + v + "\n";
  }
  return out;
}

std::string ExperimentConfig::hash() const { return sha256_hex(canonical_text()); }

std::string ExperimentConfig::get_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing key " + key);
  return it->second;
}
double ExperimentConfig::get_double(const std::string& key) const { return parse_real(key, get_string(key)); }
int ExperimentConfig::get_int(const std::string& key) const { return static_cast<int>(parse_integer(key, get_string(key))); }

std::vector<double> ExperimentConfig::get_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split(get_string(key), ',')) out.push_back(parse_real(key, item));
  return out;
}

std::vector<int> ExperimentConfig::get_int_list(const std::string& key) const {
  std::vector<int> out;
  for (const auto& item : split(get_string(key), ',')) out.push_back(static_cast<int>(parse_integer(key, item)));
  return out;
}

std::optional<std::string> ExperimentConfig::output_dir() const {
  if (!has("experiment.output")) return std::nullopt;
  return get_string("experiment.output");
}

SystemSpec ExperimentConfig::system_for(int n_atoms, double gamma_over_g) const {
  SystemSpec s;
  s.n_atoms = n_atoms;
  s.gamma = gamma_over_g;
  s.n_fock = get_int("system.n_fock");
  s.topology = get_string("system.topology") == "common" ? Topology::CommonCavity : Topology::IndependentCavities;
  s.validate();
  return s;
}

SystemSpec ExperimentConfig::system() const {
  return system_for(get_int("system.n_atoms"), get_double("system.gamma_over_g"));
}

InitialState ExperimentConfig::state() const {
  const std::string family = get_string("state.family");
  const int n = get_int("system.n_atoms");
  InitialState init;
  if (family == "ground") {
    init = ground_state(n);
  } else if (family == "dicke") {
    init = Dicke{HalfInt::from_double(get_double("state.j")), HalfInt::from_double(get_double("state.m"))};
  } else if (family == "dephased") {
    init = DephasedDicke{HalfInt::from_double(get_double("state.j")), HalfInt::from_double(get_double("state.m")),
                         get_double("state.lambda")};
  } else if (family == "mixture") {
    if (!has("state.weights")) throw ConfigError("state.weights: required for family = mixture");
    init = DickeMixture{get_list("state.weights")};
  } else {
    init = FactorizedIdentical{n, get_double("state.rho_ee"),
                               Complex(get_double("state.rho_eg_re"), get_double("state.rho_eg_im"))};
  }
  superrad::validate(init);
  if (atom_count(init) != n) {
    throw ConfigError("state: describes " + std::to_string(atom_count(init)) + " atoms but system.n_atoms = " +
                      std::to_string(n));
  }
  return init;
}

IntegratorConfig ExperimentConfig::integrator() const {
  IntegratorConfig c;
  c.rel_tol = get_double("integrator.rel_tol");
  c.max_step = get_double("integrator.max_step");
  c.validate();
  return c;
}

void ExperimentConfig::validate() const {
  (void)system();
  (void)state();
  (void)integrator();
  if (!(get_double("window.duration") > 0.0)) throw ConfigError("window.duration: must be positive");
  if (has("window.horizon") && !(get_double("window.horizon") > 0.0)) {
    throw ConfigError("window.horizon: must be positive");
  }
  if (get_int("window.grid_points") < 2) throw ConfigError("window.grid_points: must be >= 2");
  if (get_double("window.sample_dt") < 0.0) throw ConfigError("window.sample_dt: must be >= 0");
  if (has("sweep.resolution") && get_int("sweep.resolution") < 2) throw ConfigError("sweep.resolution: must be >= 2");
  if (has("sweep.n_atoms")) {
    for (int n : get_int_list("sweep.n_atoms")) {
      if (n < 1) throw ConfigError("sweep.n_atoms: entries must be >= 1");
    }
  }
  if (has("sweep.gamma_over_g")) {
    for (double g : get_list("sweep.gamma_over_g")) {
      if (g < 0.0) throw ConfigError("sweep.gamma_over_g: entries must be >= 0");
    }
  }
  if (has("sweep.lambdas")) {
    for (double l : get_list("sweep.lambdas")) {
      if (l < 0.0 || l > 1.0) throw ConfigError("sweep.lambdas: entries must lie in [0, 1]");
    }
  }
  if (has("window.plateau_start") != has("window.plateau_end")) {
    throw ConfigError("window.plateau_start and window.plateau_end must be given together");
  }
  if (has("window.plateau_start") && !(get_double("window.plateau_start") < get_double("window.plateau_end"))) {
    throw ConfigError("window.plateau_start must be below window.plateau_end");
  }
}

}  // namespace superrad::harness
