#pragma once

// Command-line surface. Exit codes: 0 success, 1 validation or usage failure, 2 runtime failure.

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "darkstates/errors.hpp"
#include "darkstates/experiments.hpp"
#include "darkstates/io/figures.hpp"
#include "darkstates/io/plan.hpp"
#include "darkstates/io/results.hpp"
#include "darkstates/oracle.hpp"
#include "darkstates/version.hpp"

namespace darkstates::io {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

inline constexpr const char* kOutputDirEnv = "DARKSTATES_OUTPUT_DIR";

inline fs::path default_output_dir(const std::string& plan_name) {
  const char* env = std::getenv(kOutputDirEnv);
  return fs::path(env && *env ? env : "results") / plan_name;
}

namespace detail {

inline void print_plan_table(const ExperimentPlan& plan, const RunLimits& limits, std::ostream& out) {
  out << "plan " << plan.name << " (" << to_string(plan.kind) << "), " << plan.seeds.size()
      << " seed(s), config hash " << hex64(config_hash(plan)) << '\n';
  out << std::left << std::setw(12) << axis_name(plan.kind) << std::setw(8) << "n_side" << std::setw(6)
      << "n_z" << std::setw(9) << "N" << std::setw(8) << "M" << std::setw(10) << "dim" << std::setw(11)
      << "memory_GB" << "budget\n";
  for (const auto& g : plan_groups(plan)) {
    const RunConfig c = configure(plan, g.axis_value, g.size);
    const bool within = projected_dimension(c) <= limits.max_dimension;
    out << std::left << std::setw(12) << g.axis_value << std::setw(8) << c.lattice.nx << std::setw(6)
        << c.lattice.nz << std::setw(9) << c.lattice.molecule_count() << std::setw(8)
        << projected_mode_count(c) << std::setw(10) << projected_dimension(c) << std::setw(11)
        << std::setprecision(3) << projected_bytes(c) / 1e9
        << (within ? "ok" : (limits.allow_large ? "over (allowed)" : "OVER")) << '\n';
  }
}

inline bool within_budget(const ExperimentPlan& plan, const RunLimits& limits) {
  if (limits.allow_large) return true;
  for (const auto& g : plan_groups(plan))
    if (projected_dimension(configure(plan, g.axis_value, g.size)) > limits.max_dimension) return false;
  return true;
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"Dark-state delocalization in disordered multimode cavities", "darkstates"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string plan_path, results_dir, out_path, kind_name;
  std::optional<std::size_t> seeds;
  unsigned threads = 1;
  bool force = false, allow_large = false;

  auto* run = app.add_subcommand("run", "execute a plan and write results");
  run->add_option("plan", plan_path, "plan file (JSON)")->required();
  run->add_option("--seeds", seeds, "number of disorder realizations per configuration")->check(CLI::PositiveNumber);
  run->add_option("--threads", threads, "concurrent cells (each solve is single-threaded)")->check(CLI::PositiveNumber);
  run->add_option("--out", out_path, std::string("output directory (default $") + kOutputDirEnv + "/<plan name> or results/<plan name>)");
  run->add_flag("--force", force, "overwrite existing result files");
  run->add_flag("--allow-large", allow_large, "lift the matrix-dimension budget");

  auto* fig = app.add_subcommand("fig", "render an SVG figure from a results directory");
  fig->add_option("results", results_dir, "results directory")->required();
  fig->add_option("--kind", kind_name, "pr_vs_n | pr_vs_layers | pr_vs_shell | pr_vs_sigma | pr_vs_lz | dispersion")->required();
  fig->add_option("--out", out_path, "output SVG path (default <results>/<kind>.svg)");
  fig->add_flag("--force", force, "overwrite an existing figure");

  auto* val = app.add_subcommand("validate", "check a plan without running it");
  val->add_option("plan", plan_path, "plan file (JSON)")->required();
  val->add_option("--seeds", seeds, "number of disorder realizations per configuration")->check(CLI::PositiveNumber);
  val->add_flag("--allow-large", allow_large, "lift the matrix-dimension budget");

  app.add_subcommand("oracle", "run the analytic limit checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  RunLimits limits;
  limits.allow_large = allow_large;

  try {
    if (*val) {
      const auto loaded = load_plan(plan_path, seeds);
      detail::print_plan_table(loaded.plan, limits, out);
      for (const auto& w : loaded.warnings) out << "warning: " << w << '\n';
      if (!detail::within_budget(loaded.plan, limits)) {
        err << "error: plan exceeds the dimension budget of " << limits.max_dimension
            << "; pass --allow-large to override\n";
        return kExitValidation;
      }
      out << "plan valid\n";
      return kExitOk;
    }

    if (*run) {
      LoadedPlan loaded;
      fs::path dir;
      try {
        loaded = load_plan(plan_path, seeds);
        dir = out_path.empty() ? default_output_dir(loaded.plan.name) : fs::path(out_path);
        check_output_dir(dir, force);
      } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
      }
      if (!detail::within_budget(loaded.plan, limits)) {
        detail::print_plan_table(loaded.plan, limits, err);
        err << "error: plan exceeds the dimension budget of " << limits.max_dimension
            << "; pass --allow-large to override\n";
        return kExitValidation;
      }
      for (const auto& w : loaded.warnings) err << "warning: " << w << '\n';

      SweepOptions options;
      const unsigned cores = std::max(1u, std::thread::hardware_concurrency());
      options.workers = threads;
      if (threads > cores) {
        err << "note: --threads " << threads << " exceeds " << cores << " available core(s); using " << cores << '\n';
        options.workers = cores;
      }
      options.solver_threads = 1;
      options.limits = limits;
      options.progress = [&](const CellResult& c, std::size_t done, std::size_t total) {
        err << '[' << done << '/' << total << "] " << axis_name(loaded.plan.kind) << '=' << c.axis_value
            << " n_side=" << c.size << " seed#" << c.seed_index << ' '
            << (c.status == CellStatus::ok ? "ok" : "FAILED: " + c.message) << ' ' << std::fixed
            << std::setprecision(2) << c.runtime_s << "s" << std::defaultfloat << '\n';
      };
      const auto start = std::chrono::steady_clock::now();
      const auto result = run_sweep(loaded.plan, options);
      RunInfo info{options.workers, options.solver_threads,
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()};
      write_results(result, dir, force, info);

      std::size_t failed = 0, unchecked = 0;
      for (const auto& c : result.cells) {
        if (c.status == CellStatus::failed) ++failed;
        else if (!c.checks.all_ok()) ++unchecked;
      }
      for (const auto& g : result.groups)
        out << axis_name(loaded.plan.kind) << '=' << g.axis_value << " n_side=" << g.size
            << " PR=" << g.stat.mean << " +/- " << g.stat.stderr_ << " (n=" << g.stat.n_realizations << ")\n";
      for (const auto& f : result.fits) {
        if (f.fit) out << "fit " << f.label << ": slope " << f.fit->slope << ", intercept " << f.fit->intercept << '\n';
        else out << "fit " << f.label << ": " << f.note << '\n';
      }
      out << "results written to " << dir.string() << '\n';
      if (failed || unchecked) {
        err << "error: " << failed << " failed cell(s), " << unchecked << " cell(s) failing numerical checks\n";
        return kExitRuntime;
      }
      return kExitOk;
    }

    if (*fig) {
      const auto kind = parse_figure_kind(kind_name);
      if (!kind) {
        err << "error: unknown figure kind '" << kind_name << "'\n\n" << fig->help();
        return kExitValidation;
      }
      const fs::path target = out_path.empty() ? fs::path(results_dir) / (kind_name + ".svg") : fs::path(out_path);
      if (fs::exists(target) && !force) {
        err << "error: '" << target.string() << "' already exists; pass --force to overwrite\n";
        return kExitValidation;
      }
      emit_figure(results_dir, *kind, target);
      out << "figure written to " << target.string() << '\n';
      return kExitOk;
    }

    // oracle
    bool all = true;
    for (const auto& c : run_oracles()) {
      out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
      all = all && c.passed;
    }
    return all ? kExitOk : kExitRuntime;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const BudgetError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return *val ? kExitValidation : kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace darkstates::io
