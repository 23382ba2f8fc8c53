// qxval: heralded entanglement generation and swapping simulator with two
// protocol/error models, closed-form oracles, and a cross-validation harness.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "qxval/config_io.h"
#include "qxval/csv.h"
#include "qxval/kernel.h"
#include "qxval/linkgen.h"
#include "qxval/noise.h"
#include "qxval/oracle.h"
#include "qxval/xval.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Exit codes (documented in the README):
//   0 success, 2 usage error, 3 unreadable config/input file,
//   4 invalid configuration, 5 mismatched/malformed compare inputs,
//   6 simulation runtime error.
enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kConfigIo = 3,
  kConfigInvalid = 4,
  kInputMismatch = 5,
  kRuntime = 6,
};

[[noreturn]] void fail(int code, const char* kind, const std::string& msg) {
  std::string one_line = msg;
  for (char& c : one_line)
    if (c == '\n') c = ' ';
  std::cerr << "error: kind=" << kind << " msg=\"" << one_line << "\"\n";
  std::exit(code);
}

/// 12 significant digits with a guaranteed decimal marker, so `1` prints as
/// "1.0" and stays machine-parsable as a real.
std::string fmt_value(double v) {
  std::string s = qxval::csv::format_double(v);
  if (s.find_first_of(".eE") == std::string::npos && s != "inf" && s != "-inf") s += ".0";
  return s;
}

void print_value(const std::string& name, double v) {
  std::cout << name << " = " << fmt_value(v) << "\n";
}

json json_num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

qxval::Config validated_or_die(const qxval::Config& cfg) {
  const auto result = qxval::validate_config(cfg);
  if (result.ok()) return *result.config;
  std::string msg = std::to_string(result.errors.size()) + " invariant violation(s):";
  for (const auto& e : result.errors) {
    std::cout << "violation: " << e.field << ": " << e.message << "\n";
    msg += " " + e.field + ": " + e.message + ";";
  }
  fail(kConfigInvalid, "config-invalid", msg);
}

struct RunOptions {
  std::string config_path;
  std::string out_dir;
  int experiment = 0;  // 0 = not set on the command line
  std::optional<std::uint64_t> seed;
  std::optional<int> replicas;
  std::optional<int> trials;
  std::optional<int> jobs;
  std::string trace_path;
  int verbosity = 0;
};

qxval::ParsedConfig load_config(const std::string& path) {
  if (path.empty()) return qxval::ParsedConfig{};
  if (!fs::exists(path)) fail(kConfigIo, "config-io", "cannot read config file: " + path);
  try {
    return qxval::parse_config_file(path);
  } catch (const qxval::ConfigParseError& e) {
    if (std::string(e.what()).rfind("cannot read", 0) == 0)
      fail(kConfigIo, "config-io", e.what());
    fail(kConfigInvalid, "config-invalid", e.what());
  }
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(kRuntime, "runtime", "cannot write " + path.string());
  out << content;
}

void write_crossval_jsonl(const fs::path& path, const qxval::xval::CrossValReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(kRuntime, "runtime", "cannot write " + path.string());
  for (const auto& row : report.rows) {
    json j;
    j["experiment"] = report.experiment;
    j["config_index"] = row.config_index;
    j["label"] = row.label;
    j["model_a"] = report.model_a;
    j["model_b"] = report.model_b;
    j["mean_a"] = json_num(row.mean_a);
    j["mean_b"] = json_num(row.mean_b);
    j["oracle_a"] = json_num(row.oracle_a);
    j["oracle_b"] = json_num(row.oracle_b);
    j["ratio"] = json_num(row.ratio);
    j["z_a"] = json_num(row.z_a);
    j["z_b"] = json_num(row.z_b);
    j["z_ab"] = json_num(row.z_ab);
    j["verdict"] = std::string(qxval::xval::verdict_name(row.verdict));
    out << j.dump() << "\n";
  }
}

int cmd_run(const RunOptions& opts) {
  const qxval::ParsedConfig parsed = load_config(opts.config_path);

  int experiment = 1;
  if (parsed.experiment.experiment) experiment = *parsed.experiment.experiment;
  if (opts.experiment != 0) experiment = opts.experiment;
  if (experiment < 1 || experiment > 3)
    fail(kConfigInvalid, "config-invalid", "experiment id must be 1, 2 or 3");

  qxval::xval::ExperimentConfig xc = qxval::xval::ExperimentConfig::defaults_for(experiment);
  xc.base = parsed.domain;
  const auto& file = parsed.experiment;
  if (file.replicas) xc.replicas = *file.replicas;
  if (file.trials) xc.trials = *file.trials;
  if (file.seed) xc.base_seed = *file.seed;
  if (file.jobs) xc.jobs = *file.jobs;
  if (file.n_mem_sweep) xc.n_mem_sweep = *file.n_mem_sweep;
  if (file.d_sweep_km) xc.d_sweep_km = *file.d_sweep_km;
  if (file.p_g_grid) xc.p_g_grid = *file.p_g_grid;
  if (file.p_m_grid) xc.p_m_grid = *file.p_m_grid;
  if (file.tau_sweep_s) xc.tau_sweep_s = *file.tau_sweep_s;
  if (opts.seed) xc.base_seed = *opts.seed;
  if (opts.replicas) xc.replicas = *opts.replicas;
  if (opts.trials) xc.trials = *opts.trials;
  if (opts.jobs) xc.jobs = *opts.jobs;

  xc.base = validated_or_die(xc.base);

  fs::path out_dir = opts.out_dir;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(kRuntime, "runtime", "cannot create output directory " + out_dir.string());

  if (opts.verbosity > 0)
    std::cout << "running experiment " << experiment << " (seed " << xc.base_seed << ", jobs "
              << xc.jobs << ")\n";

  qxval::xval::ExperimentResult result;
  try {
    result = qxval::xval::run_experiment(xc);
  } catch (const std::invalid_argument& e) {
    fail(kConfigInvalid, "config-invalid", e.what());
  } catch (const qxval::SimulationError& e) {
    fail(kRuntime, "runtime", e.what());
  }

  const std::string prefix = "exp" + std::to_string(experiment);
  if (!result.replica_rows.empty()) {
    std::ostringstream buf;
    qxval::csv::write_replica_csv(buf, result.replica_rows);
    write_file(out_dir / (prefix + "_replicas.csv"), buf.str());
  }

  std::vector<qxval::xval::SummaryRow> quisp_rows, sequence_rows;
  for (const auto& row : result.summary) {
    (row.model == qxval::ProtocolModel::kRoundTrain ? quisp_rows : sequence_rows).push_back(row);
  }
  for (const auto* rows : {&quisp_rows, &sequence_rows}) {
    std::ostringstream buf;
    qxval::csv::write_summary_csv(buf, *rows);
    write_file(out_dir / (prefix + "_summary_" + std::string(qxval::model_name(rows->front().model)) + ".csv"),
               buf.str());
  }

  const auto report = qxval::xval::compare(quisp_rows, sequence_rows);
  std::string text = report.summary_text();
  if (result.exp2) {
    std::ostringstream diag;
    diag << "diagnostics: sequence_d_invariant=" << (result.exp2->sequence_d_invariant ? "yes" : "no")
         << " quisp_slower_at_max_d=" << (result.exp2->quisp_slower_at_max_d ? "yes" : "no")
         << " quisp_affine_max_rel_residual="
         << qxval::csv::format_double(result.exp2->quisp_affine_max_rel_residual) << "\n";
    text += diag.str();
  }
  write_file(out_dir / (prefix + "_crossval.txt"), text);
  write_crossval_jsonl(out_dir / (prefix + "_crossval.jsonl"), report);
  std::cout << text;

  if (!opts.trace_path.empty() && (experiment == 1 || experiment == 2)) {
    // Event trace of configuration 0, replica 0, for each model.
    for (const auto model :
         {qxval::ProtocolModel::kRoundTrain, qxval::ProtocolModel::kPerPairHandshake}) {
      qxval::Config cfg = xc.base;
      if (experiment == 1) cfg.hardware.n_memories = xc.n_mem_sweep.front();
      if (experiment == 2) cfg.geometry.bsa_offset_km = xc.d_sweep_km.front();
      cfg = validated_or_die(cfg);
      const std::uint64_t cfg_key = 0;
      qxval::Rng rng(qxval::derive_seed(
          xc.base_seed, {static_cast<std::uint64_t>(experiment),
                         model == qxval::ProtocolModel::kRoundTrain ? 0ull : 1ull, cfg_key, 0ull}));
      std::ofstream trace(opts.trace_path + "." + std::string(qxval::model_name(model)) + ".log",
                          std::ios::binary);
      qxval::run_link(model, cfg, rng, &trace);
    }
  }
  return kOk;
}

int cmd_validate(const std::string& path) {
  const qxval::ParsedConfig parsed = load_config(path);
  const qxval::Config cfg = validated_or_die(parsed.domain);
  std::cout << "ok\n";
  std::cout << "normalized: geometry.d_km = " << qxval::csv::format_double(cfg.geometry.bsa_offset_km)
            << (cfg.endpoints_swapped ? " (endpoints relabeled)" : "") << "\n";
  std::cout << "p_succ = " << fmt_value(qxval::success_probability(cfg.geometry, cfg.hardware))
            << "\n";
  return kOk;
}

int cmd_compare(const std::string& path_a, const std::string& path_b, const std::string& out_dir_arg) {
  auto read_rows = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(kConfigIo, "config-io", "cannot read " + path);
    try {
      return qxval::csv::read_summary_csv(in);
    } catch (const std::exception& e) {
      fail(kInputMismatch, "input", std::string(e.what()) + " (" + path + ")");
    }
  };
  const auto rows_a = read_rows(path_a);
  const auto rows_b = read_rows(path_b);
  qxval::xval::CrossValReport report;
  try {
    report = qxval::xval::compare(rows_a, rows_b);
  } catch (const std::invalid_argument& e) {
    fail(kInputMismatch, "input", e.what());
  }

  fs::path out_dir = out_dir_arg;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(kRuntime, "runtime", "cannot create output directory " + out_dir.string());
  write_file(out_dir / "crossval.txt", report.summary_text());
  write_crossval_jsonl(out_dir / "crossval.jsonl", report);
  std::cout << report.summary_text();
  return kOk;
}

std::string default_out_dir() {
  if (const char* env = std::getenv("QXVAL_OUT_DIR")) return env;
  return "results";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event simulator of heralded entanglement generation and swapping;\n"
               "cross-validates a round-train (quisp) and a per-pair-handshake (sequence)\n"
               "protocol model against closed-form oracles and each other."};
  app.require_subcommand(1);

  // --- run ---
  RunOptions run_opts;
  run_opts.out_dir = default_out_dir();
  auto* run = app.add_subcommand("run", "Run experiment 1, 2 or 3 and write CSV/crossval outputs");
  run->add_option("--experiment,-e", run_opts.experiment, "Experiment id (1, 2 or 3)")
      ->check(CLI::Range(1, 3));
  run->add_option("--config,-c", run_opts.config_path, "Key/value config file");
  run->add_option("--out,-o", run_opts.out_dir, "Output directory (default $QXVAL_OUT_DIR or ./results)");
  std::uint64_t seed_arg = 0;
  auto* seed_opt = run->add_option("--seed", seed_arg, "Base seed override");
  int replicas_arg = 0, trials_arg = 0, jobs_arg = 0;
  auto* replicas_opt = run->add_option("--replicas", replicas_arg, "Replica count override")->check(CLI::PositiveNumber);
  auto* trials_opt = run->add_option("--trials", trials_arg, "Fidelity trials override")->check(CLI::PositiveNumber);
  auto* jobs_opt = run->add_option("--jobs,-j", jobs_arg, "Worker threads (output is identical for any value)")->check(CLI::PositiveNumber);
  run->add_option("--trace", run_opts.trace_path, "Dump the event trace of config 0 / replica 0 to <path>.<model>.log");
  run->add_flag("-v,--verbose", run_opts.verbosity, "Progress output");

  // --- oracle ---
  auto* oracle_cmd = app.add_subcommand("oracle", "Print a closed-form prediction");
  oracle_cmd->require_subcommand(1);
  double pg = 0.0, pm = 0.0, f1 = 1.0, f2 = 1.0, t1 = 0.0, t2 = 0.0, tmsg = 0.0;
  double tau = std::numeric_limits<double>::infinity(), dt = 1e-6;
  double qp = 0.0, f_in = 1.0, t_hold = 0.0, p_succ_arg = 0.0;
  std::uint64_t q_n = 0;
  std::int64_t n_bell_arg = 1000;
  int n_mem_arg = 1;

  auto* fs_cmd = oracle_cmd->add_subcommand("f-swap", "Swap fidelity with noiseless link pairs");
  fs_cmd->add_option("--pg", pg, "two-qubit gate error probability")->required();
  fs_cmd->add_option("--pm", pm, "measurement flip probability")->required();

  auto* fsw_cmd = oracle_cmd->add_subcommand("f-swap-werner", "Swap fidelity of two Werner pairs");
  fsw_cmd->add_option("--f1", f1)->required();
  fsw_cmd->add_option("--f2", f2)->required();
  fsw_cmd->add_option("--pg", pg)->required();
  fsw_cmd->add_option("--pm", pm)->required();

  auto* fsd_cmd = oracle_cmd->add_subcommand("f-swap-decoherence", "Swap fidelity with memory decoherence");
  fsd_cmd->add_option("--pg", pg)->required();
  fsd_cmd->add_option("--pm", pm)->required();
  fsd_cmd->add_option("--t1", t1, "link 1 generation time [s]")->required();
  fsd_cmd->add_option("--t2", t2, "link 2 generation time [s]")->required();
  fsd_cmd->add_option("--tmsg", tmsg, "swap message delay [s]")->required();
  fsd_cmd->add_option("--tau", tau, "coherence time [s] (inf allowed)")->required();
  fsd_cmd->add_option("--dt", dt, "slice duration [s]");

  auto* q00_cmd = oracle_cmd->add_subcommand("q00", "Depolarizing identity-survival entry");
  q00_cmd->add_option("--p", qp, "per-slice depolarizing probability")->required();
  q00_cmd->add_option("--n", q_n, "slice count")->required();

  auto* cal_cmd = oracle_cmd->add_subcommand("calibrate", "Per-slice p hitting 1/e at the coherence time");
  cal_cmd->add_option("--tau", tau, "coherence time [s] (inf allowed)")->required();
  cal_cmd->add_option("--dt", dt, "slice duration [s]");

  auto* wd_cmd = oracle_cmd->add_subcommand("werner-decohere", "Werner fidelity after storage");
  wd_cmd->add_option("--f", f_in, "input fidelity")->required();
  wd_cmd->add_option("--t", t_hold, "storage time [s]")->required();
  wd_cmd->add_option("--tau", tau, "coherence time [s] (inf allowed)")->required();

  auto* er_cmd = oracle_cmd->add_subcommand("expected-rounds", "ceil(N_Bell / (N_mem p_succ))");
  er_cmd->add_option("--n-bell", n_bell_arg)->required();
  er_cmd->add_option("--n-mem", n_mem_arg)->required();
  er_cmd->add_option("--p-succ", p_succ_arg)->required();

  std::string oracle_config_path;
  int oracle_n_mem = 0;
  double oracle_d = -1.0;
  auto add_timing_options = [&](CLI::App* cmd) {
    cmd->add_option("--config,-c", oracle_config_path, "Key/value config file");
    cmd->add_option("--n-mem", oracle_n_mem, "memories per node override");
    cmd->add_option("--d-km", oracle_d, "BSA offset override [km]");
  };
  auto* qt_cmd = oracle_cmd->add_subcommand("quisp-time", "Round-train timing prediction");
  add_timing_options(qt_cmd);
  auto* st_cmd = oracle_cmd->add_subcommand("sequence-time", "Per-pair-handshake timing prediction");
  add_timing_options(st_cmd);

  auto* ps_cmd = oracle_cmd->add_subcommand("p-succ", "Per-attempt success probability");
  ps_cmd->add_option("--config,-c", oracle_config_path, "Key/value config file");

  // --- validate ---
  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check a config file against every invariant");
  validate_cmd->add_option("config", validate_path, "Key/value config file")->required();

  // --- compare ---
  std::string compare_a, compare_b, compare_out = default_out_dir();
  auto* compare_cmd = app.add_subcommand("compare", "Cross-validate two summary CSVs");
  compare_cmd->add_option("table_a", compare_a, "summary CSV for model A")->required();
  compare_cmd->add_option("table_b", compare_b, "summary CSV for model B")->required();
  compare_cmd->add_option("--out,-o", compare_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::stringstream ss;
    ss << e.what();
    std::string one_line = ss.str();
    for (char& c : one_line)
      if (c == '\n') c = ' ';
    std::cerr << "error: kind=usage msg=\"" << one_line << "\"\n";
    return kUsage;
  }

  try {
    if (*run) return cmd_run([&] {
      RunOptions o = run_opts;
      if (*seed_opt) o.seed = seed_arg;
      if (*replicas_opt) o.replicas = replicas_arg;
      if (*trials_opt) o.trials = trials_arg;
      if (*jobs_opt) o.jobs = jobs_arg;
      return o;
    }());
    if (*validate_cmd) return cmd_validate(validate_path);
    if (*compare_cmd) return cmd_compare(compare_a, compare_b, compare_out);

    if (*oracle_cmd) {
      auto timing_config = [&]() {
        qxval::Config cfg = load_config(oracle_config_path).domain;
        if (oracle_n_mem > 0) cfg.hardware.n_memories = oracle_n_mem;
        if (oracle_d >= 0.0) cfg.geometry.bsa_offset_km = oracle_d;
        return validated_or_die(cfg);
      };
      if (*fs_cmd) {
        print_value("f_swap", qxval::oracle::f_swap(pg, pm));
      } else if (*fsw_cmd) {
        print_value("f_swap_werner", qxval::oracle::f_swap_werner(f1, f2, pg, pm));
      } else if (*fsd_cmd) {
        print_value("f_swap_decoherence",
                    qxval::oracle::f_swap_decoherence(pg, pm, t1, t2, tmsg, tau, dt));
      } else if (*q00_cmd) {
        print_value("q00", qxval::depolarizing_q00(qp, q_n));
      } else if (*cal_cmd) {
        print_value("p_depolarizing", qxval::calibrate_depolarizing(tau, dt));
      } else if (*wd_cmd) {
        print_value("werner_fidelity", qxval::werner_decohere(f_in, t_hold, tau));
      } else if (*er_cmd) {
        std::cout << "expected_rounds = "
                  << qxval::oracle::expected_rounds(n_bell_arg, n_mem_arg, p_succ_arg) << "\n";
      } else if (*qt_cmd || *st_cmd) {
        const qxval::Config cfg = timing_config();
        const auto pred = *qt_cmd ? qxval::oracle::quisp_expected_time(cfg)
                                  : qxval::oracle::sequence_expected_time(cfg);
        print_value("t_setup_s", pred.t_setup_s);
        print_value("t_round_s", pred.t_round_s);
        std::cout << "rounds = " << pred.rounds << "\n";
        print_value("t_exp_s", pred.t_exp_s);
      } else if (*ps_cmd) {
        const qxval::Config cfg = timing_config();
        print_value("p_succ", qxval::success_probability(cfg.geometry, cfg.hardware));
      }
      return kOk;
    }
  } catch (const std::invalid_argument& e) {
    fail(kConfigInvalid, "config-invalid", e.what());
  } catch (const qxval::SimulationError& e) {
    fail(kRuntime, "runtime", e.what());
  } catch (const std::exception& e) {
    fail(kRuntime, "runtime", e.what());
  }
  return kOk;
}
