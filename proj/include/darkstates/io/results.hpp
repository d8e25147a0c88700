#pragma once

// Result files of one sweep:
//   results.csv    one row per (axis value, size, seed) cell; deterministic bytes
//   summary.json   ensemble statistics and fits; deterministic bytes
//   manifest.json  config hash, resolved plan, seeds, version, per-cell status and timing
//   dispersion.csv, bare_modes.csv, molecular_energies.csv   (dispersion plans only)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "darkstates/errors.hpp"
#include "darkstates/experiments.hpp"
#include "darkstates/io/plan.hpp"
#include "darkstates/version.hpp"

namespace darkstates::io {

namespace fs = std::filesystem;

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& s) {
  if (s == "nan" || s.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw IoError("malformed number '" + s + "'");
  return v;
}

/// JSON has no NaN; absent statistics become null.
inline json json_number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// --- CSV --------------------------------------------------------------------------------

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

using CsvRow = std::vector<std::string>;

inline std::vector<CsvRow> parse_csv(const std::string& text) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string cell;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = any = true;
    } else if (c == ',') {
      row.push_back(std::move(cell));
      cell.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !cell.empty()) {
        row.push_back(std::move(cell));
        rows.push_back(std::move(row));
      }
      row.clear();
      cell.clear();
      any = false;
    } else {
      cell += c;
      any = true;
    }
  }
  if (quoted) throw IoError("unterminated quoted CSV field");
  if (any || !cell.empty()) {
    row.push_back(std::move(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

// --- results table ----------------------------------------------------------------------

inline const std::vector<std::string>& results_columns() {
  static const std::vector<std::string> cols = {
      "kind", "axis", "axis_value", "n_side", "n_z", "seed_index", "seed", "status", "dimension",
      "n_molecules", "n_modes", "dark_count", "bright_count", "dark_pr_mean", "k0_gap",
      "omega_c0", "shell_e_min", "shell_e_max", "g0", "eta", "max_residual", "frobenius_norm",
      "checks_ok", "message"};
  return cols;
}

inline std::string results_csv(const SweepResult& result) {
  std::ostringstream os;
  const auto& cols = results_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& c : result.cells) {
    const bool ok = c.status == CellStatus::ok;
    os << to_string(result.plan.kind) << ',' << axis_name(result.plan.kind) << ','
       << format_double(c.axis_value) << ',' << c.size << ',' << c.nz << ',' << c.seed_index << ','
       << c.seed << ',' << (ok ? "ok" : "failed") << ',' << c.dimension << ',' << c.n_molecules
       << ',' << c.n_modes << ',' << c.dark_count << ',' << c.bright_count << ','
       << format_double(c.dark_pr_mean) << ',' << format_double(c.k0_gap) << ','
       << format_double(c.omega_c0) << ',' << format_double(c.shell_e_min) << ','
       << format_double(c.shell_e_max) << ',' << format_double(c.g0) << ','
       << format_double(c.eta) << ',' << format_double(c.checks.max_residual) << ','
       << format_double(c.checks.frobenius) << ',' << (ok && c.checks.all_ok() ? 1 : 0) << ','
       << csv_escape(c.message) << '\n';
  }
  return os.str();
}

/// One parsed results.csv row.
struct ResultRow {
  std::string kind;
  std::string axis;
  double axis_value = 0.0;
  int n_side = 0;
  int n_z = 1;
  std::size_t seed_index = 0;
  std::uint64_t seed = 0;
  bool ok = true;
  std::size_t dimension = 0;
  std::size_t n_molecules = 0;
  std::size_t n_modes = 0;
  std::size_t dark_count = 0;
  std::size_t bright_count = 0;
  double dark_pr_mean = 0.0;
  double k0_gap = 0.0;
  double omega_c0 = 0.0;
  double shell_e_min = 0.0;
  double shell_e_max = 0.0;
  double g0 = 0.0;
  double eta = 0.0;
  double max_residual = 0.0;
  double frobenius_norm = 0.0;
  bool checks_ok = false;
  std::string message;
};

inline std::vector<ResultRow> parse_results_csv(const std::string& text) {
  const auto rows = parse_csv(text);
  if (rows.empty() || rows[0] != results_columns()) throw IoError("results.csv: unexpected header");
  std::vector<ResultRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != results_columns().size())
      throw IoError("results.csv line " + std::to_string(i + 1) + ": expected " +
                    std::to_string(results_columns().size()) + " fields");
    try {
      ResultRow row;
      row.kind = r[0];
      row.axis = r[1];
      row.axis_value = parse_double(r[2]);
      row.n_side = std::stoi(r[3]);
      row.n_z = std::stoi(r[4]);
      row.seed_index = std::stoull(r[5]);
      row.seed = std::stoull(r[6]);
      row.ok = r[7] == "ok";
      row.dimension = std::stoull(r[8]);
      row.n_molecules = std::stoull(r[9]);
      row.n_modes = std::stoull(r[10]);
      row.dark_count = std::stoull(r[11]);
      row.bright_count = std::stoull(r[12]);
      row.dark_pr_mean = parse_double(r[13]);
      row.k0_gap = parse_double(r[14]);
      row.omega_c0 = parse_double(r[15]);
      row.shell_e_min = parse_double(r[16]);
      row.shell_e_max = parse_double(r[17]);
      row.g0 = parse_double(r[18]);
      row.eta = parse_double(r[19]);
      row.max_residual = parse_double(r[20]);
      row.frobenius_norm = parse_double(r[21]);
      row.checks_ok = r[22] == "1";
      row.message = r[23];
      out.push_back(std::move(row));
    } catch (const std::logic_error&) {
      throw IoError("results.csv line " + std::to_string(i + 1) + ": malformed field");
    }
  }
  return out;
}

// --- summary and manifest ---------------------------------------------------------------

inline json stat_json(const EnsembleStat& s) {
  return {{"mean", json_number(s.mean)},
          {"std", json_number(s.std)},
          {"stderr", json_number(s.stderr_)},
          {"n_realizations", s.n_realizations},
          {"n_empty", s.n_empty},
          {"n_states_per_realization", s.n_states_per_realization}};
}

inline json summary_json(const SweepResult& result) {
  json j;
  j["kind"] = to_string(result.plan.kind);
  j["axis"] = axis_name(result.plan.kind);
  j["groups"] = json::array();
  bool checks = true;
  for (const auto& c : result.cells)
    if (c.status == CellStatus::ok && !c.checks.all_ok()) checks = false;
  for (const auto& g : result.groups) {
    j["groups"].push_back({{"axis_value", g.axis_value},
                           {"n_side", g.size},
                           {"n_molecules", g.n_molecules},
                           {"failed", g.failed},
                           {"dark_pr", stat_json(g.stat)}});
  }
  j["fits"] = json::array();
  for (const auto& f : result.fits) {
    json fj{{"label", f.label}, {"note", f.note}};
    if (f.fit) {
      fj["slope"] = f.fit->slope;
      fj["intercept"] = f.fit->intercept;
      fj["r2"] = json_number(f.fit->r2);
      fj["n_points"] = f.fit->n_points;
    }
    j["fits"].push_back(fj);
  }
  j["property_checks_ok"] = checks;
  j["warnings"] = result.warnings;
  if (result.dispersion) j["exciton_energy"] = result.dispersion->exciton_energy;
  return j;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct RunInfo {
  unsigned workers = 1;
  int solver_threads = 1;
  double wall_seconds = 0.0;
};

inline json manifest_json(const SweepResult& result, const RunInfo& info) {
  json j;
  j["tool"] = "darkstates";
  j["version"] = kVersion;
  j["config_hash"] = hex64(config_hash(result.plan));
  j["plan"] = plan_to_json(result.plan);
  j["seeds"] = result.plan.seeds;
  j["warnings"] = result.warnings;
  j["created_utc"] = utc_timestamp();
  j["workers"] = info.workers;
  j["solver_threads"] = info.solver_threads;
  j["wall_seconds"] = info.wall_seconds;
  j["cells"] = json::array();
  for (const auto& c : result.cells) {
    j["cells"].push_back({{"axis_value", c.axis_value},
                          {"n_side", c.size},
                          {"n_z", c.nz},
                          {"seed", c.seed},
                          {"status", c.status == CellStatus::ok ? "ok" : "failed"},
                          {"runtime_s", c.runtime_s},
                          {"message", c.message}});
  }
  return j;
}

inline std::string dispersion_csv(const DispersionData& d) {
  std::ostringstream os;
  os << "k,energy,photon_fraction,band\n";
  for (const auto& r : d.rows)
    os << format_double(r.k) << ',' << format_double(r.energy) << ','
       << format_double(r.photon_fraction) << ',' << to_string(r.band) << '\n';
  return os.str();
}

inline std::string bare_modes_csv(const DispersionData& d) {
  std::ostringstream os;
  os << "k,energy\n";
  for (const auto& [k, e] : d.bare) os << format_double(k) << ',' << format_double(e) << '\n';
  return os.str();
}

inline std::string molecular_energies_csv(const DispersionData& d) {
  std::ostringstream os;
  os << "index,energy\n";
  for (std::size_t i = 0; i < d.molecular_energies.size(); ++i)
    os << i << ',' << format_double(d.molecular_energies[i]) << '\n';
  return os.str();
}

inline const std::vector<std::string>& result_file_names() {
  static const std::vector<std::string> names = {"results.csv", "summary.json", "manifest.json",
                                                 "dispersion.csv", "bare_modes.csv",
                                                 "molecular_energies.csv"};
  return names;
}

/// Refuses to touch a directory holding earlier results unless `force`.
inline void check_output_dir(const fs::path& dir, bool force) {
  if (force || !fs::exists(dir)) return;
  if (!fs::is_directory(dir)) throw IoError("'" + dir.string() + "' exists and is not a directory");
  for (const auto& name : result_file_names())
    if (fs::exists(dir / name))
      throw IoError("'" + (dir / name).string() + "' already exists; pass --force to overwrite");
}

inline void write_results(const SweepResult& result, const fs::path& dir, bool force,
                          const RunInfo& info = {}) {
  check_output_dir(dir, force);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  write_text(dir / "results.csv", results_csv(result));
  write_text(dir / "summary.json", summary_json(result).dump(2) + "\n");
  if (result.dispersion) {
    write_text(dir / "dispersion.csv", dispersion_csv(*result.dispersion));
    write_text(dir / "bare_modes.csv", bare_modes_csv(*result.dispersion));
    write_text(dir / "molecular_energies.csv", molecular_energies_csv(*result.dispersion));
  } else if (force) {
    for (const char* stale : {"dispersion.csv", "bare_modes.csv", "molecular_energies.csv"})
      fs::remove(dir / stale, ec);
  }
  write_text(dir / "manifest.json", manifest_json(result, info).dump(2) + "\n");
}

// --- reading back -----------------------------------------------------------------------

struct StoredDispersion {
  double exciton_energy = 0.0;
  std::vector<DispersionRow> rows;
  std::vector<std::pair<double, double>> bare;
  std::vector<double> molecular_energies;
};

struct StoredResults {
  std::string kind;
  std::string axis;
  std::vector<ResultRow> rows;
  std::optional<StoredDispersion> dispersion;
};

inline StoredResults read_results(const fs::path& dir) {
  StoredResults out;
  out.rows = parse_results_csv(read_text(dir / "results.csv"));
  if (!out.rows.empty()) {
    out.kind = out.rows.front().kind;
    out.axis = out.rows.front().axis;
  }
  if (fs::exists(dir / "dispersion.csv")) {
    StoredDispersion d;
    const auto summary = json::parse(read_text(dir / "summary.json"), nullptr, false);
    if (summary.is_discarded() || !summary.contains("exciton_energy"))
      throw IoError("summary.json lacks exciton_energy for a dispersion result");
    d.exciton_energy = summary["exciton_energy"].get<double>();
    const auto rows = parse_csv(read_text(dir / "dispersion.csv"));
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].size() != 4) throw IoError("dispersion.csv: malformed row " + std::to_string(i + 1));
      d.rows.push_back({parse_double(rows[i][0]), parse_double(rows[i][1]), parse_double(rows[i][2]),
                        rows[i][3] == "LP" ? Band::lower : Band::upper});
    }
    const auto bare = parse_csv(read_text(dir / "bare_modes.csv"));
    for (std::size_t i = 1; i < bare.size(); ++i)
      d.bare.emplace_back(parse_double(bare[i].at(0)), parse_double(bare[i].at(1)));
    if (fs::exists(dir / "molecular_energies.csv")) {
      const auto mol = parse_csv(read_text(dir / "molecular_energies.csv"));
      for (std::size_t i = 1; i < mol.size(); ++i) d.molecular_energies.push_back(parse_double(mol[i].at(1)));
    }
    out.dispersion = std::move(d);
  }
  return out;
}

}  // namespace darkstates::io
