#pragma once

// Plan files: strict-schema JSON. Missing keys, axis and lattice included, take per-kind
// defaults; unknown keys, wrong types and out-of-range values are errors carrying a
// line/column or a field path.

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "darkstates/errors.hpp"
#include "darkstates/experiments.hpp"

namespace darkstates::io {

using nlohmann::json;

struct LoadedPlan {
  ExperimentPlan plan;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("", "expected an object");
  }

  void allow(std::initializer_list<const char*> keys) {
    std::set<std::string> known(keys.begin(), keys.end());
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!known.count(it.key())) fail(it.key(), "unknown key");
  }

  bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  const json& at(const char* key) const { return j_.at(key); }
  std::string field(const std::string& key) const { return path_ + "/" + key; }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError("plan field '" + (key.empty() ? (path_.empty() ? "/" : path_) : field(key)) + "': " + what);
  }

  void get(const char* key, double& out) const {
    if (!has(key)) return;
    if (!at(key).is_number()) fail(key, "expected a number");
    out = at(key).get<double>();
  }
  void get(const char* key, int& out) const {
    if (!has(key)) return;
    if (!at(key).is_number_integer()) fail(key, "expected an integer");
    out = at(key).get<int>();
  }
  void get(const char* key, bool& out) const {
    if (!has(key)) return;
    if (!at(key).is_boolean()) fail(key, "expected true or false");
    out = at(key).get<bool>();
  }
  void get(const char* key, std::string& out) const {
    if (!has(key)) return;
    if (!at(key).is_string()) fail(key, "expected a string");
    out = at(key).get<std::string>();
  }
  void get(const char* key, std::uint64_t& out) const {
    if (!has(key)) return;
    if (!at(key).is_number_unsigned()) fail(key, "expected a non-negative integer");
    out = at(key).get<std::uint64_t>();
  }
  void get(const char* key, std::size_t& out, int) const {
    std::uint64_t v = out;
    get(key, v);
    out = static_cast<std::size_t>(v);
  }
  Reader child(const char* key) const {
    if (!at(key).is_object()) fail(key, "expected an object");
    return Reader(at(key), field(key));
  }

 private:
  const json& j_;
  std::string path_;
};

}  // namespace detail

inline const char* to_string(SolverRoute r) {
  return r == SolverRoute::standing_wave ? "standing_wave" : "hermitian";
}

/// Builds a plan from parsed JSON. Seeds: explicit `seeds`, else `seed_count` values
/// derived from `base_seed`. `seed_override` (the --seeds flag) selects the first n.
inline ExperimentPlan plan_from_json(const json& j, std::optional<std::size_t> seed_override = {}) {
  detail::Reader r(j, "");
  r.allow({"name", "kind", "axis", "sizes", "lattice", "cavity", "disorder", "target_rabi",
           "g0_override", "threshold", "shell_m_max", "solver", "seeds", "base_seed", "seed_count",
           "fit_min_molecules", "dispersion_per_band"});
  ExperimentPlan plan;
  if (!r.has("kind")) r.fail("kind", "required");
  std::string kind;
  r.get("kind", kind);
  const auto parsed = parse_sweep_kind(kind);
  if (!parsed) r.fail("kind", "unknown experiment kind '" + kind + "'");
  plan.kind = *parsed;
  plan.name = kind;
  r.get("name", plan.name);

  auto& base = plan.base;
  base.lattice.nx = base.lattice.ny = default_side(plan.kind);
  if (r.has("lattice")) {
    auto l = r.child("lattice");
    l.allow({"nx", "ny", "nz", "ax", "ay", "az"});
    l.get("nx", base.lattice.nx);
    base.lattice.ny = base.lattice.nx;
    l.get("ny", base.lattice.ny);
    l.get("nz", base.lattice.nz);
    l.get("ax", base.lattice.ax);
    base.lattice.ay = base.lattice.az = base.lattice.ax;
    l.get("ay", base.lattice.ay);
    l.get("az", base.lattice.az);
  }
  if (r.has("cavity")) {
    auto c = r.child("cavity");
    c.allow({"lz", "epsilon"});
    c.get("lz", base.lz);
    c.get("epsilon", base.epsilon);
  }
  if (r.has("disorder")) {
    auto d = r.child("disorder");
    d.allow({"mean_energy", "sigma_e", "orientational", "positional_fraction"});
    d.get("mean_energy", base.disorder.mean_energy);
    d.get("sigma_e", base.disorder.sigma_e);
    d.get("orientational", base.disorder.orientational);
    d.get("positional_fraction", base.disorder.positional_fraction);
  }
  r.get("target_rabi", base.target_rabi);
  if (r.has("g0_override")) {
    double g0 = 0.0;
    r.get("g0_override", g0);
    base.g0_override = g0;
  }
  r.get("threshold", base.threshold);
  if (r.has("shell_m_max")) {
    int m = 0;
    r.get("shell_m_max", m);
    base.shell.m_max = m;
  }
  if (r.has("solver")) {
    std::string s;
    r.get("solver", s);
    if (s == "standing_wave") base.route = SolverRoute::standing_wave;
    else if (s == "hermitian") base.route = SolverRoute::hermitian;
    else r.fail("solver", "expected 'standing_wave' or 'hermitian'");
  }
  r.get("fit_min_molecules", plan.fit_min_molecules);
  r.get("dispersion_per_band", plan.dispersion_per_band, 0);

  const auto number_list = [&](const char* key, bool integral) {
    std::vector<double> out;
    if (!r.at(key).is_array()) r.fail(key, "expected an array");
    for (std::size_t i = 0; i < r.at(key).size(); ++i) {
      const auto& v = r.at(key)[i];
      if (integral ? !v.is_number_integer() : !v.is_number())
        r.fail(std::string(key) + "/" + std::to_string(i), integral ? "expected an integer" : "expected a number");
      out.push_back(v.get<double>());
    }
    return out;
  };
  if (r.has("axis")) {
    plan.axis = number_list("axis", integral_axis(plan.kind));
  } else {
    plan.axis = default_axis(plan.kind);
  }
  if (r.has("sizes")) {
    if (plan.kind == SweepKind::size_sweep) r.fail("sizes", "size_sweep takes its sizes from 'axis'");
    for (double v : number_list("sizes", true)) plan.sizes.push_back(static_cast<int>(v));
  }

  if (r.has("seeds")) {
    if (r.has("base_seed") || r.has("seed_count")) r.fail("seeds", "give either 'seeds' or 'base_seed'/'seed_count'");
    const auto& s = r.at("seeds");
    if (!s.is_array()) r.fail("seeds", "expected an array");
    plan.seeds.clear();
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!s[i].is_number_unsigned()) r.fail("seeds/" + std::to_string(i), "expected a non-negative integer");
      plan.seeds.push_back(s[i].get<std::uint64_t>());
    }
    if (seed_override) {
      if (*seed_override > plan.seeds.size())
        throw ConfigError("--seeds " + std::to_string(*seed_override) + " exceeds the " +
                          std::to_string(plan.seeds.size()) + " seeds listed in the plan");
      plan.seeds.resize(*seed_override);
    }
  } else {
    std::uint64_t base_seed = kDefaultBaseSeed;
    std::size_t count = kDefaultSeedCount;
    r.get("base_seed", base_seed);
    r.get("seed_count", count, 0);
    if (seed_override) count = *seed_override;
    plan.seeds = default_seeds(base_seed, count);
  }
  if (plan.seeds.empty()) throw ConfigError("plan needs at least one seed");
  return plan;
}

/// Fully resolved plan: every parameter explicit, seeds listed. Hash input and manifest body.
inline json plan_to_json(const ExperimentPlan& plan) {
  const auto& b = plan.base;
  json j;
  j["name"] = plan.name;
  j["kind"] = to_string(plan.kind);
  if (integral_axis(plan.kind)) {
    j["axis"] = json::array();
    for (double v : plan.axis) j["axis"].push_back(static_cast<long long>(v));
  } else {
    j["axis"] = plan.axis;
  }
  j["sizes"] = plan.sizes;
  j["lattice"] = {{"nx", b.lattice.nx}, {"ny", b.lattice.ny}, {"nz", b.lattice.nz},
                  {"ax", b.lattice.ax}, {"ay", b.lattice.ay}, {"az", b.lattice.az}};
  j["cavity"] = {{"lz", b.lz}, {"epsilon", b.epsilon}};
  j["disorder"] = {{"mean_energy", b.disorder.mean_energy}, {"sigma_e", b.disorder.sigma_e},
                   {"orientational", b.disorder.orientational},
                   {"positional_fraction", b.disorder.positional_fraction}};
  j["target_rabi"] = b.target_rabi;
  j["g0_override"] = b.g0_override ? json(*b.g0_override) : json(nullptr);
  j["threshold"] = b.threshold;
  j["shell_m_max"] = b.shell.m_max ? json(*b.shell.m_max) : json(nullptr);
  j["solver"] = to_string(b.route);
  j["seeds"] = plan.seeds;
  j["fit_min_molecules"] = plan.fit_min_molecules;
  j["dispersion_per_band"] = plan.dispersion_per_band;
  return j;
}

/// FNV-1a 64 over the canonical (sorted-key, shortest round-trip) dump of the resolved plan.
inline std::uint64_t config_hash(const ExperimentPlan& plan) {
  const std::string text = plan_to_json(plan).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

inline LoadedPlan parse_plan(const std::string& text, const std::string& origin = "<plan>",
                             std::optional<std::size_t> seed_override = {}) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = detail::line_column(text, e.byte);
    std::string what = e.what();
    if (auto pos = what.find("syntax error"); pos != std::string::npos) what = what.substr(pos);
    throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
  }
  LoadedPlan out;
  try {
    out.plan = plan_from_json(j, seed_override);
    out.warnings = validate(out.plan);
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  } catch (const json::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return out;
}

inline LoadedPlan load_plan(const std::string& path, std::optional<std::size_t> seed_override = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open plan file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_plan(ss.str(), path, seed_override);
}

}  // namespace darkstates::io
