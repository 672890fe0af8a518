// Command-line front end: gap / simulate / phases / verify / experiment.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fplay/fplay.hpp"

namespace {

using namespace fplay;

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  if (out.empty()) throw ConfigError("expected a comma-separated list of numbers");
  return out;
}

// Permutations are given 1-based on the command line ("2,1,3").
std::vector<int> parse_perm(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stoi(tok) - 1);
  }
  return out;
}

// "--start e2,e3" -> vertex indices (2, 3).
std::pair<int, int> parse_start(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw ConfigError("start must look like \"e1,e1\"");
  auto one = [](std::string tok) {
    if (tok.empty() || (tok[0] != 'e' && tok[0] != 'E')) {
      throw ConfigError("start vertices must look like \"e1\"");
    }
    return std::stoi(tok.substr(1));
  };
  return {one(s.substr(0, comma)), one(s.substr(comma + 1))};
}

struct MatrixOpts {
  std::string file;
  int identity = 0;
  std::string diag;
};

Matrix<double> load_matrix(const MatrixOpts& m) {
  if (!m.file.empty()) {
    std::ifstream in(m.file);
    if (!in) throw ConfigError("cannot open matrix file: " + m.file);
    nlohmann::json j;
    in >> j;
    return matrix_from_json(j);
  }
  if (m.identity > 0) return Matrix<double>::identity(m.identity);
  if (!m.diag.empty()) return Matrix<double>::diagonal(parse_doubles(m.diag));
  throw ConfigError("no matrix given; use --matrix, --identity, or --diag");
}

struct RunOpts {
  MatrixOpts matrix;
  std::int64_t rounds = 100;
  std::string dynamic = "fp";
  std::string sigma_x, sigma_y;
  std::string start = "e1,e1";
  std::string mode = "exact";
  std::string snapshots = "none";
  std::string out;
};

void add_matrix_flags(CLI::App* cmd, MatrixOpts& m) {
  cmd->add_option("--matrix", m.file, "payoff matrix JSON file");
  cmd->add_option("--identity", m.identity, "identity matrix of this size");
  cmd->add_option("--diag", m.diag, "diagonal entries, e.g. \"1,2,3\"");
}

void add_run_flags(CLI::App* cmd, RunOpts& r) {
  add_matrix_flags(cmd, r.matrix);
  cmd->add_option("--rounds", r.rounds, "number of rounds");
  cmd->add_option("--dynamic", r.dynamic, "fp|afp|ofp")
      ->check(CLI::IsMember({"fp", "afp", "ofp"}));
  cmd->add_option("--sigma-x", r.sigma_x, "row tie-break permutation, 1-based");
  cmd->add_option("--sigma-y", r.sigma_y, "column tie-break permutation, 1-based");
  cmd->add_option("--start", r.start, "initial vertices, e.g. \"e1,e1\"");
  cmd->add_option("--mode", r.mode, "exact|float")->check(CLI::IsMember({"exact", "float"}));
  cmd->add_option("--snapshots", r.snapshots, "none|full|strided:k");
  cmd->add_option("--out", r.out, "output path (default stdout)");
}

Dynamic parse_dynamic(const std::string& d) {
  if (d == "fp") return Dynamic::kFP;
  if (d == "afp") return Dynamic::kAFP;
  return Dynamic::kOFP;
}

SnapshotPolicy parse_snapshots(const std::string& s) {
  if (s == "none") return SnapshotPolicy::none();
  if (s == "full") return SnapshotPolicy::full();
  if (s == "boundaries") return SnapshotPolicy::boundaries();
  if (s.rfind("strided:", 0) == 0) {
    const std::int64_t k = std::stoll(s.substr(8));
    if (k < 1) throw ConfigError("stride must be >= 1");
    return SnapshotPolicy::strided(k);
  }
  throw ConfigError("snapshots must be none, full, boundaries, or strided:k");
}

TieBreak make_rule(const RunOpts& r, int n) {
  TieBreak rule = TieBreak::identity(n);
  if (!r.sigma_x.empty()) rule.sigma_x = parse_perm(r.sigma_x);
  if (!r.sigma_y.empty()) rule.sigma_y = parse_perm(r.sigma_y);
  rule.validate(n);
  return rule;
}

template <Scalar T>
std::vector<T> vertex(int n, int i1) {
  if (i1 < 1 || i1 > n) throw ConfigError("start vertex out of range");
  std::vector<T> v(static_cast<std::size_t>(n), T{0});
  v[static_cast<std::size_t>(i1 - 1)] = T{1};
  return v;
}

template <Scalar T>
Trace<T> run_from_opts(const RunOpts& r, const Matrix<T>& a, SnapshotPolicy policy, T tol) {
  const auto [si, sj] = parse_start(r.start);
  return run(parse_dynamic(r.dynamic), a, make_rule(r, a.n()), vertex<T>(a.n(), si),
             vertex<T>(a.n(), sj), r.rounds, policy, tol);
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw ConfigError("cannot open output file: " + path);
  return file;
}

int cmd_gap(const MatrixOpts& m, const std::string& xs, const std::string& ys) {
  const Matrix<double> a = load_matrix(m);
  const SimplexPoint x(parse_doubles(xs));
  const SimplexPoint y(parse_doubles(ys));
  std::cout << duality_gap(x.coords, y.coords, a) << "\n";
  return 0;
}

int cmd_simulate(const RunOpts& r) {
  const Matrix<double> af = load_matrix(r.matrix);
  const SnapshotPolicy policy = parse_snapshots(r.snapshots);
  std::ofstream file;
  std::ostream& os = open_out(r.out, file);
  std::optional<std::string> err;
  if (r.mode == "exact") {
    const Matrix<std::int64_t> a = to_exact(af);
    const auto trace = run_from_opts<std::int64_t>(r, a, policy, 0);
    write_trace_jsonl(os, trace);
    err = trace.error;
  } else {
    const double tol = 1e-9 * (1.0 + af.max_abs_entry());
    const auto trace = run_from_opts<double>(r, af, policy, tol);
    write_trace_jsonl(os, trace);
    err = trace.error;
  }
  if (err) {
    std::cerr << "run stopped early: " << *err << "\n";
    return 3;
  }
  return 0;
}

template <Scalar T>
void print_segmentation(std::ostream& os, const Trace<T>& trace) {
  const Segmentation<T> seg = segment_phases(trace);
  os << "phases (" << seg.phases.size() << "):\n";
  os << "  start  len  i  j  kind\n";
  for (const auto& ph : seg.phases) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "  %5lld  %3lld  %d  %d  %s\n",
                  static_cast<long long>(ph.start_t), static_cast<long long>(ph.len), ph.i, ph.j,
                  ph.sync() ? "sync" : "split");
    os << buf;
  }
  os << "pairs (" << seg.pairs.size() << "):\n";
  os << "  s  start  end  from->to  sync  split  psi_start  psi_end\n";
  const double scale = static_cast<double>(trace.matrix.scale());
  for (const auto& pr : seg.pairs) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "  %lld  %5lld  %5lld  %d->%d  %4lld  %5lld  %9.6g  %9.6g\n",
                  static_cast<long long>(pr.s), static_cast<long long>(pr.start_t),
                  static_cast<long long>(pr.end_t), pr.from, pr.to,
                  static_cast<long long>(pr.sync_len), static_cast<long long>(pr.split_len),
                  static_cast<double>(pr.psi_start) / scale,
                  static_cast<double>(pr.psi_end) / scale);
    os << buf;
  }
  if (seg.prologue) os << "prologue rounds: " << seg.prologue->len << "\n";
  if (seg.epilogue) os << "epilogue rounds: " << seg.epilogue->len << "\n";
  if (!seg.well_formed) os << "note: " << seg.note << "\n";
}

int cmd_phases(const RunOpts& r, const std::string& trace_file) {
  std::ofstream file;
  std::ostream& os = open_out(r.out, file);
  if (!trace_file.empty()) {
    const Matrix<double> a = load_matrix(r.matrix);
    std::ifstream in(trace_file);
    if (!in) throw ConfigError("cannot open trace file: " + trace_file);
    print_segmentation(os, read_trace_jsonl(in, a));
    return 0;
  }
  const Matrix<double> af = load_matrix(r.matrix);
  if (r.mode == "exact") {
    print_segmentation(os, run_from_opts<std::int64_t>(r, to_exact(af),
                                                       SnapshotPolicy::boundaries(), 0));
  } else {
    const double tol = 1e-9 * (1.0 + af.max_abs_entry());
    print_segmentation(os, run_from_opts<double>(r, af, SnapshotPolicy::boundaries(), tol));
  }
  return 0;
}

int cmd_verify(const RunOpts& r) {
  const Matrix<double> af = load_matrix(r.matrix);
  std::vector<Report> reports;
  std::optional<std::string> run_error;
  if (r.mode == "exact") {
    const auto trace =
        run_from_opts<std::int64_t>(r, to_exact(af), SnapshotPolicy::boundaries(), 0);
    reports = verify_all(trace);
    run_error = trace.error;
  } else {
    const double tol = 1e-9 * (1.0 + af.max_abs_entry());
    const auto trace = run_from_opts<double>(r, af, SnapshotPolicy::boundaries(), tol);
    reports = verify_all(trace);
    run_error = trace.error;
  }
  nlohmann::json out = nlohmann::json::array();
  bool all_hold = true;
  for (const auto& rep : reports) {
    out.push_back(report_to_json(rep));
    if (rep.applicable && !rep.holds) all_hold = false;
  }
  std::ofstream file;
  std::ostream& os = open_out(r.out, file);
  os << out.dump(2) << "\n";
  if (run_error) {
    std::cerr << "run stopped early: " << *run_error << "\n";
    return 3;
  }
  return all_hold ? 0 : 1;
}

int cmd_experiment(const std::string& config_file, const std::string& out_override, int threads,
                   std::uint64_t seed_override, bool seed_given) {
  std::ifstream in(config_file);
  if (!in) throw ConfigError("cannot open config file: " + config_file);
  nlohmann::json j;
  in >> j;
  ExperimentConfig cfg = experiment_config_from_json(j);
  if (seed_given) cfg.seed = seed_override;
  if (!out_override.empty()) cfg.output_path = out_override;
  const BatchResult batch = run_batch(cfg, threads);
  std::ofstream file;
  std::ostream& os = open_out(cfg.output_path, file);
  write_curve_csv(os, batch.curve);
  int failed = 0;
  double worst_ratio = 0.0;
  for (const auto& s : batch.summaries) {
    if (s.failed) {
      ++failed;
      std::cerr << "run " << s.run << " failed: " << s.error << "\n";
    }
    worst_ratio = std::max(worst_ratio, s.max_gap_over_sqrt_t);
  }
  std::cerr << "runs=" << cfg.runs << " rounds=" << cfg.rounds << " failed=" << failed
            << " max psi/sqrt(t) over t>=100: " << worst_ratio << "\n";
  return failed == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fictitious-play dynamics engine"};
  app.require_subcommand(1);

  MatrixOpts gap_matrix;
  std::string gap_x, gap_y;
  auto* gap_cmd = app.add_subcommand("gap", "duality gap of a strategy pair");
  add_matrix_flags(gap_cmd, gap_matrix);
  gap_cmd->add_option("--x", gap_x, "row strategy, e.g. \"0.5,0.5\"")->required();
  gap_cmd->add_option("--y", gap_y, "column strategy")->required();

  RunOpts sim_opts;
  auto* sim_cmd = app.add_subcommand("simulate", "run one trace, write JSONL");
  add_run_flags(sim_cmd, sim_opts);

  RunOpts phase_opts;
  std::string phase_trace;
  auto* phase_cmd = app.add_subcommand("phases", "segment a trace into phases and pairs");
  add_run_flags(phase_cmd, phase_opts);
  phase_cmd->add_option("--trace", phase_trace, "read a JSONL trace instead of simulating");

  RunOpts verify_opts;
  verify_opts.rounds = 100000;
  auto* verify_cmd = app.add_subcommand("verify", "run all applicable checkers");
  add_run_flags(verify_cmd, verify_opts);

  std::string exp_config, exp_out;
  int exp_threads = 1;
  std::uint64_t exp_seed = 0;
  auto* exp_cmd = app.add_subcommand("experiment", "batch runner from a JSON config");
  exp_cmd->add_option("--config", exp_config, "experiment config JSON")->required();
  exp_cmd->add_option("--out", exp_out, "CSV output path (overrides config)");
  exp_cmd->add_option("--threads", exp_threads, "worker threads");
  auto* seed_opt = exp_cmd->add_option("--seed", exp_seed, "seed (overrides config)");

  try {
    app.parse(argc, argv);
    if (gap_cmd->parsed()) return cmd_gap(gap_matrix, gap_x, gap_y);
    if (sim_cmd->parsed()) return cmd_simulate(sim_opts);
    if (phase_cmd->parsed()) return cmd_phases(phase_opts, phase_trace);
    if (verify_cmd->parsed()) return cmd_verify(verify_opts);
    if (exp_cmd->parsed()) {
      return cmd_experiment(exp_config, exp_out, exp_threads, exp_seed, seed_opt->count() > 0);
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DimensionError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
