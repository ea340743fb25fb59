// commands.hpp - command implementations behind the fogran CLI
//
// Each command maps a parsed config to rendered output and an exit status,
// so the CLI front end and the tests share one code path.

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fogran/analysis.hpp"
#include "fogran/config.hpp"
#include "fogran/export.hpp"
#include "fogran/scheme.hpp"
#include "fogran/simulator.hpp"

namespace fogran {

enum class Format { Csv, Json };

enum ExitCode : int {
  kExitOk = 0,
  kExitIo = 1,
  kExitParse = 2,
  kExitValidation = 3,
  kExitInfeasible = 4,
  kExitSynthesisGap = 5,
  kExitSimulation = 6,
};

struct CommandResult {
  int exit_code = kExitOk;
  std::string output;  // goes to --out
  std::string error;   // goes to stderr
};

namespace detail {

inline std::string render(const Table& t, Format f) { return f == Format::Csv ? t.to_csv() : dump(t.to_json()); }

struct SweepRange {
  double start = 0.0;
  double stop = 1.0;
  std::int64_t steps = 101;

  std::vector<double> points() const {
    std::vector<double> out;
    for (std::int64_t i = 0; i < steps; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(steps - 1);
      out.push_back(i == steps - 1 ? stop : start + (stop - start) * t);
    }
    return out;
  }
};

inline SweepRange sweep_range(const Config& cfg, double lo, double hi, double default_stop, const char* axis) {
  SweepRange r;
  r.start = cfg.number_or("sweep_start", lo);
  r.stop = cfg.number_or("sweep_stop", default_stop);
  r.steps = cfg.integer("sweep_steps").value_or(101);
  if (!(r.start <= r.stop)) throw ValidationError("sweep_start", "must not exceed sweep_stop");
  if (r.steps < 2) throw ValidationError("sweep_steps", "must be at least 2");
  if (!(r.start >= lo) || !(r.stop <= hi) || std::isinf(r.stop))
    throw ValidationError("sweep_start", std::string("sweep over ") + axis + " leaves the valid range");
  return r;
}

// Grid points plus exact extra points; an extra point replaces any grid point
// within the tie tolerance so each abscissa appears once.
inline std::vector<double> merge_points(std::vector<double> grid, const std::vector<double>& extra, double lo,
                                        double hi) {
  for (double x : extra) {
    if (x < lo || x > hi) continue;
    auto same = [&](double g) { return nearly_equal(g, x); };
    grid.erase(std::remove_if(grid.begin(), grid.end(), same), grid.end());
    grid.push_back(x);
  }
  std::sort(grid.begin(), grid.end());
  return grid;
}

inline double serial_achievable_ndt(const SystemParams& p) {
  if (!min_pipelined_ndt(p).finite()) return kInf;
  return synthesize_serial_policy(p, Objective::Serial).ndt.sum();
}

inline std::vector<double> values_or_grid(const Config& cfg, const std::string& key, double lo, double hi,
                                          std::int64_t steps, bool skip_lo) {
  if (cfg.has(key)) return cfg.list(key);
  std::vector<double> out;
  const std::int64_t first = skip_lo ? 1 : 0;
  const std::int64_t n = skip_lo ? steps : steps - 1;
  for (std::int64_t i = first; i <= n; ++i)
    out.push_back(i == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n));
  return out;
}

inline Table infeasible_record(const SystemParams& p) {
  Table t({"status", "mu", "r_f", "r_d"});
  t.add({std::string("infeasible"), p.mu, p.r_f, p.r_d});
  return t;
}

inline Table report_table(const std::vector<std::pair<std::string, DeliveryReport>>& reports) {
  Table t({"delivery", "total_symbols", "fronthaul_1", "fronthaul_2", "edge", "d2d_12", "d2d_21", "decode_success",
           "empirical_ndt", "gap_to_closed_form"});
  for (const auto& [name, r] : reports)
    t.add({name, r.total_symbols, r.busy.fronthaul_1, r.busy.fronthaul_2, r.busy.edge, r.busy.d2d_12, r.busy.d2d_21,
           r.decode_success, r.empirical_ndt, r.gap_to_closed_form});
  return t;
}

inline Table convergence_table(const ConvergenceSeries& s) {
  Table t({"blocks", "log_p", "file_bits", "total_symbols", "empirical_ndt", "closed_form_gap"});
  for (const auto& pt : s.points)
    t.add({pt.blocks, pt.log_p, s.file_bits, pt.total_symbols, pt.empirical_ndt, pt.closed_form_gap});
  return t;
}

inline std::vector<std::int64_t> integer_list(const Config& cfg, const std::string& key, std::int64_t fallback) {
  if (!cfg.has(key)) return {fallback};
  std::vector<std::int64_t> out;
  for (double v : cfg.list(key)) {
    if (v != std::floor(v) || v < 1) throw ParseError(cfg.line_of(key), "expected positive integers for '" + key + "'");
    out.push_back(static_cast<std::int64_t>(v));
  }
  return out;
}

inline SimOptions sim_options(const Config& cfg) {
  return SimOptions{cfg.number_or("degenerate_passthrough", 0.0) != 0.0};
}

}  // namespace detail

inline CommandResult cmd_eval(const Config& cfg, Format f) {
  const auto p = params_from_config(cfg);
  const auto ndt = min_pipelined_ndt(p);
  const auto th = d2d_threshold(p);
  Table t({"mu", "r_f", "r_d", "ndt", "regime", "threshold_raw", "threshold", "d2d_beneficial", "gain_bound"});
  t.add({p.mu, p.r_f, p.r_d, ndt.value, classify_regime(p).label(), th.raw, th.clamped,
         is_d2d_beneficial(p.mu, p.r_f), pipelining_gain_bound(p.mu)});
  if (f == Format::Json) return {kExitOk, dump(t.to_json().at(0)), {}};
  return {kExitOk, t.to_csv(), {}};
}

inline CommandResult cmd_sweep_mu(const Config& cfg, Format f) {
  SystemParams p;
  p.r_f = cfg.require_number("r_f");
  p.r_d = cfg.require_number("r_d");
  p.n_files = static_cast<int>(cfg.integer("n_files").value_or(2));
  require_valid(p);
  const auto range = detail::sweep_range(cfg, 0.0, 1.0, 1.0, "mu");

  std::vector<double> knots;
  if (p.r_f > 0.0 && p.r_f < 1.0) {
    for (double r_d : {p.r_d, 0.0}) {
      const auto curve = ndt_vs_mu_breakpoints(p.r_f, r_d);
      for (const auto& k : curve.knots()) knots.push_back(k.mu);
    }
  }
  Table t({"mu", "ndt", "ndt_no_d2d", "regime"});
  for (double mu : detail::merge_points(range.points(), knots, range.start, range.stop)) {
    SystemParams q = p;
    q.mu = mu;
    SystemParams base = q;
    base.r_d = 0.0;
    t.add({mu, min_pipelined_ndt(q).value, min_pipelined_ndt(base).value, classify_regime(q).label()});
  }
  return {kExitOk, detail::render(t, f), {}};
}

inline CommandResult cmd_sweep_rd(const Config& cfg, Format f) {
  SystemParams p;
  p.mu = cfg.require_number("mu");
  p.r_f = cfg.require_number("r_f");
  p.n_files = static_cast<int>(cfg.integer("n_files").value_or(2));
  require_valid(p);
  const auto range = detail::sweep_range(cfg, 0.0, kInf, 1.0, "r_d");
  const double threshold = d2d_threshold(p).clamped;

  Table t({"r_d", "ndt_pipelined", "ndt_serial_achievable", "threshold_marker"});
  for (double r_d : detail::merge_points(range.points(), {threshold}, range.start, range.stop)) {
    SystemParams q = p;
    q.r_d = r_d;
    t.add({r_d, min_pipelined_ndt(q).value, detail::serial_achievable_ndt(q), r_d == threshold});
  }
  return {kExitOk, detail::render(t, f), {}};
}

inline CommandResult cmd_gain_map(const Config& cfg, Format f) {
  const std::int64_t steps = cfg.integer("grid_steps").value_or(11);
  if (steps < 2) throw ValidationError("grid_steps", "must be at least 2");
  const double r_f_max = cfg.number_or("r_f_max", 2.0);
  const double r_d_max = cfg.number_or("r_d_max", 2.0);
  if (!(r_f_max > 0.0) || std::isinf(r_f_max)) throw ValidationError("r_f_max", "must be a finite value > 0");
  if (!(r_d_max >= 0.0) || std::isinf(r_d_max)) throw ValidationError("r_d_max", "must be a finite value >= 0");
  const int n_files = static_cast<int>(cfg.integer("n_files").value_or(2));

  const auto mus = detail::values_or_grid(cfg, "mu_values", 0.0, 1.0, steps, false);
  const auto rfs = detail::values_or_grid(cfg, "r_f_values", 0.0, r_f_max, steps, true);
  const auto rds = detail::values_or_grid(cfg, "r_d_values", 0.0, r_d_max, steps, false);

  Table t({"mu", "r_f", "r_d", "pipelined_ndt", "serial_achievable_ndt", "observed_gain", "bound"});
  for (double mu : mus)
    for (double r_f : rfs)
      for (double r_d : rds) {
        const SystemParams p{mu, r_f, r_d, n_files};
        require_valid(p);
        const double pipelined = min_pipelined_ndt(p).value;
        const double serial = detail::serial_achievable_ndt(p);
        const double gain = std::isfinite(pipelined) ? serial / pipelined : std::nan("");
        t.add({mu, r_f, r_d, pipelined, serial, gain, pipelining_gain_bound(mu)});
      }
  return {kExitOk, detail::render(t, f), {}};
}

inline CommandResult cmd_convergence(const Config& cfg, Format f) {
  const auto p = params_from_config(cfg);
  const std::int64_t file_bits = cfg.integer("file_bits").value_or(0);
  if (file_bits <= 0) throw ValidationError("file_bits", "must be positive");
  const auto blocks = detail::integer_list(cfg, "blocks_list", cfg.integer("blocks").value_or(1));
  std::vector<double> log_ps = cfg.list("log_p_list");
  if (log_ps.empty()) log_ps.push_back(cfg.require_number("log_p"));

  const auto series = convergence_study(p, blocks, log_ps, file_bits, detail::sim_options(cfg));
  if (series.infeasible) return {kExitInfeasible, detail::render(detail::infeasible_record(p), f), "instance is infeasible"};
  return {kExitOk, detail::render(detail::convergence_table(series), f), {}};
}

inline CommandResult cmd_simulate(const Config& cfg, Format f) {
  const auto p = params_from_config(cfg);
  const auto scale = scale_from_config(cfg);
  if (!min_pipelined_ndt(p).finite())
    return {kExitInfeasible, detail::render(detail::infeasible_record(p), f), "instance is infeasible"};
  const auto opts = detail::sim_options(cfg);

  const auto policy = synthesize_serial_policy(p);
  const auto serial = worst_case_report(policy, p, scale);
  const auto pipelined = worst_case_report(block_markov_convert(policy, scale), p, opts);

  std::optional<ConvergenceSeries> series;
  if (cfg.has("blocks_list")) {
    std::vector<double> log_ps = cfg.list("log_p_list");
    if (log_ps.empty()) log_ps.push_back(scale.log_p);
    series = convergence_study(p, detail::integer_list(cfg, "blocks_list", scale.blocks), log_ps, scale.file_bits, opts);
  }

  if (f == Format::Json) {
    Json doc{{"policy", to_json(policy)}, {"serial", to_json(serial)}, {"pipelined", to_json(pipelined)}};
    if (series) doc["convergence"] = detail::convergence_table(*series).to_json();
    return {kExitOk, dump(doc), {}};
  }
  std::string out = detail::report_table({{"serial", serial}, {"pipelined", pipelined}}).to_csv();
  if (series) out += "\n" + detail::convergence_table(*series).to_csv();
  return {kExitOk, out, {}};
}

// Runs a command and maps library errors to exit codes.
inline CommandResult run_command(const std::function<CommandResult(const Config&, Format)>& cmd,
                                 const std::string& config_path, Format f) {
  try {
    return cmd(Config::load(config_path), f);
  } catch (const ParseError& e) {
    return {kExitParse, {}, "parse error: " + std::string(e.what())};
  } catch (const ValidationError& e) {
    return {kExitValidation, {}, "invalid value: " + std::string(e.what())};
  } catch (const UnsupportedRange& e) {
    return {kExitValidation, {}, "invalid value: " + std::string(e.what())};
  } catch (const InfeasibleError& e) {
    return {kExitInfeasible, {}, "infeasible: " + std::string(e.what())};
  } catch (const SynthesisGap& e) {
    return {kExitSynthesisGap, {}, "synthesis gap: " + std::string(e.what())};
  } catch (const ConstraintBreach& e) {
    return {kExitSimulation, {}, "constraint breach: " + std::string(e.what())};
  } catch (const ScheduleError& e) {
    return {kExitSimulation, {}, "schedule error: " + std::string(e.what())};
  } catch (const PlacementError& e) {
    return {kExitSimulation, {}, "placement error: " + std::string(e.what())};
  } catch (const std::exception& e) {
    return {kExitIo, {}, e.what()};
  }
}

}  // namespace fogran
