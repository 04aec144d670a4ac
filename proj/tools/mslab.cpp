// mslab: generate mixtures, run mean-shift variants, score clusterings,
// run sweeps and the theory-check suite.

#include "mslab/mslab.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace mslab;

struct Common
{
  std::string config_path;
  std::string out_dir;
  bool verbose = false;
};

struct KernelOpts
{
  std::string kernel = "biweight";
  double h = 0.6;
  double hmin = 0.2;
  double hmax = 1.6;
  double hinit = 0.6;
  std::string nu = "paper-log";
  std::uint64_t max_iter = 10'000'000;
  double tol = 1e-6;

  void add_to(CLI::App& app)
  {
    app.add_option("--kernel", kernel, "biweight | triweight | quadweight")
      ->check(CLI::IsMember({"biweight", "triweight", "quadweight"}));
    app.add_option("--h", h, "Bandwidth for MS/BMS/SMS")->check(CLI::PositiveNumber);
    app.add_option("--hmin", hmin, "DSMS lower bandwidth")->check(CLI::PositiveNumber);
    app.add_option("--hmax", hmax, "DSMS upper bandwidth")->check(CLI::PositiveNumber);
    app.add_option("--hinit", hinit, "DSMS initial bandwidth")->check(CLI::PositiveNumber);
    app.add_option("--nu", nu, "paper-log | constant(c) | power(p)");
    app.add_option("--max-iter", max_iter, "Draw budget (BMS: sweeps = max-iter / n)")
      ->check(CLI::PositiveNumber);
    app.add_option("--tol", tol, "Convergence threshold on shifts")->check(CLI::PositiveNumber);
  }

  ScheduleParams schedule() const { return {hmin, hmax, hinit, NuSpec::parse(nu)}; }
};

std::string resolve(const Common& c, const std::string& path)
{
  if (path.empty() || c.out_dir.empty() || std::filesystem::path(path).is_absolute())
    return path;
  return (std::filesystem::path(c.out_dir) / path).string();
}

std::string with_suffix(const std::string& path, const std::string& suffix)
{
  std::filesystem::path p(path);
  p.replace_extension();
  return p.string() + suffix;
}

template <typename Fn>
void write_file(const std::string& path, Fn&& fn)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot open '" + path + "' for writing");
  fn(out);
  if (!out)
    throw std::runtime_error("failed writing '" + path + "'");
}

template <typename T>
std::vector<T> parse_list(const std::string& text)
{
  std::vector<T> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::istringstream field(item);
    T v{};
    if (!(field >> v) || !(field >> std::ws).eof())
      throw std::invalid_argument("bad list element '" + item + "'");
    out.push_back(v);
  }
  if (out.empty())
    throw std::invalid_argument("empty list");
  return out;
}

// MSLAB_WORKERS caps the worker count; without --workers it is also the default.
unsigned worker_count(unsigned requested)
{
  unsigned cap = 0;
  if (const char* env = std::getenv("MSLAB_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1)
      cap = static_cast<unsigned>(v);
  }
  if (requested == 0)
    return cap > 0 ? cap : 1;
  return cap > 0 ? std::min(requested, cap) : requested;
}

// Inserts "--key value" for every config-file key the user did not pass.
std::vector<std::string> merge_config(const std::vector<std::string>& args)
{
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size())
      path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0)
      path = args[i].substr(9);
  }
  if (path.empty())
    return args;
  std::set<std::string> given;
  for (const auto& a : args)
    if (a.rfind("--", 0) == 0)
      given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
  std::vector<std::string> merged = args;
  for (const auto& [key, value] : read_key_values(path)) {
    if (given.count(key))
      continue;
    if (value == "true" || value == "false") {
      if (value == "true")
        merged.push_back("--" + key);
      continue;
    }
    merged.push_back("--" + key);
    merged.push_back(value);
  }
  return merged;
}

int cmd_gen(const Common& common, std::size_t n_per_cluster, std::uint64_t seed, const std::string& out,
            const std::string& spread)
{
  const auto reading = spread == "stddev" ? SpreadReading::stddev : SpreadReading::variance;
  const LabeledData data = generate(three_cluster_spec(n_per_cluster, reading), seed);
  write_points_csv(resolve(common, out), data.points, data.labels);
  return 0;
}

struct RunOpts
{
  std::string algo = "dsms";
  std::string input;
  std::uint64_t seed = 0;
  std::string trace = "off";
  std::string out = "trace.json";
  std::string clusters;
  std::string metrics;
  std::string final_state;
  std::string labeled = "auto";
  double diagnosis_fraction = 1.0;
  double merge_radius = 0.0;
  KernelOpts k;
};

int cmd_run(const Common& common, const RunOpts& o)
{
  LabeledData data{State(1, {0.0}), {}};
  RunConfig cfg;
  try {
    const LabelColumn labels = o.labeled == "yes"  ? LabelColumn::present
                               : o.labeled == "no" ? LabelColumn::absent
                                                   : LabelColumn::auto_detect;
    data = read_points_csv(o.input, labels);
    cfg.algorithm = parse_algorithm(o.algo);
    cfg.profile = Profile::from_name(o.k.kernel);
    cfg.bandwidth = o.k.h;
    cfg.schedule = o.k.schedule();
    cfg.max_iterations = o.k.max_iter;
    cfg.convergence_threshold = o.k.tol;
    cfg.seed = o.seed;
    cfg.trace_level = parse_trace_level(o.trace);
    cfg.diagnosis_fraction = o.diagnosis_fraction;
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  if (common.verbose)
    std::cerr << "running " << o.algo << " on " << data.points.size() << " points in R^" << data.points.dim()
              << '\n';

  const RunTrace trace = run(data.points, cfg);
  const double radius = o.merge_radius > 0.0 ? o.merge_radius : 0.5 * cfg.resolution();
  const Clustering clusters = extract_clusters(trace.final_state, radius);

  const std::string out = resolve(common, o.out);
  write_file(out, [&](std::ostream& s) { write_trace_json(s, trace, cfg); });
  write_file(resolve(common, o.clusters.empty() ? with_suffix(o.out, ".clusters.csv") : o.clusters),
             [&](std::ostream& s) { write_assignments_csv(s, clusters); });
  write_file(resolve(common, o.metrics.empty() ? with_suffix(o.out, ".metrics.txt") : o.metrics),
             [&](std::ostream& s) { write_metrics(s, clusters, data.labels); });
  if (!o.final_state.empty())
    write_points_csv(resolve(common, o.final_state), trace.final_state, data.labels);
  if (common.verbose)
    std::cerr << to_string(trace.stop_reason) << " after " << trace.iterations_used << " iterations, "
              << clusters.count() << " clusters\n";
  return trace.stop_reason == StopReason::converged ? 0 : 2;
}

int cmd_metrics(const Common& common, const std::string& assign, const std::string& truth_path,
                const std::string& out)
{
  const auto predicted = read_assignments_csv(assign);
  const LabeledData truth = read_points_csv(truth_path);
  if (!truth.has_labels())
    throw std::invalid_argument("'" + truth_path + "' carries no label column");
  const ContingencyTable table = contingency(predicted, truth.labels);
  auto emit = [&](std::ostream& s) {
    s << "cluster_count = " << table.rows() << '\n';
    s << "acp = " << fmt17(acp(table)) << '\n';
    s << "alp = " << fmt17(alp(table)) << '\n';
    s << "k = " << fmt17(k_score(table)) << '\n';
  };
  if (out.empty())
    emit(std::cout);
  else
    write_file(resolve(common, out), emit);
  return 0;
}

struct SweepOpts
{
  std::string kind = "sparse";
  std::size_t reps = 100;
  std::uint64_t seed = 0;
  std::string out = "results.csv";
  bool plotdata = false;
  std::string grid;
  unsigned workers = 0;
  std::string ci = "t";
  std::string spread = "variance";
  double range_floor = 0.1;
  KernelOpts k;
};

int cmd_sweep(const Common& common, const SweepOpts& o)
{
  ExperimentSettings s;
  s.profile = Profile::from_name(o.k.kernel);
  s.bandwidth = o.k.h;
  s.schedule = o.k.schedule();
  s.max_iterations = o.k.max_iter;
  s.convergence_threshold = o.k.tol;
  s.reps = o.reps;
  s.master_seed = o.seed;
  s.workers = worker_count(o.workers);
  s.ci = o.ci == "bootstrap" ? CiMethod::bootstrap : CiMethod::student_t;
  s.spread = o.spread == "stddev" ? SpreadReading::stddev : SpreadReading::variance;
  s.range_floor = o.range_floor;

  SweepResult result;
  if (o.kind == "sparse")
    result = sweep_sparse(s, parse_list<std::size_t>(o.grid.empty() ? "10,25,50,75,100,150,200" : o.grid));
  else if (o.kind == "range")
    result = sweep_bandwidth_range(s, parse_list<double>(o.grid.empty() ? "0,0.2,0.6,1,1.4,1.8,2.2,2.6,3" : o.grid));
  else if (o.kind == "imbalance")
    result = sweep_imbalance(s, parse_list<double>(o.grid.empty() ? "0.1,0.2,0.3,0.5,0.7,1" : o.grid));
  else
    result = sweep_cluster_count(s, parse_list<std::size_t>(o.grid.empty() ? "2,3,4,5,6,7,8" : o.grid));
  for (const auto& note : result.notes)
    std::cerr << "note: " << note << '\n';

  write_file(resolve(common, o.out), [&](std::ostream& out) { write_sweep_csv(out, result); });
  if (o.plotdata)
    write_file(resolve(common, with_suffix(o.out, ".plotdata.csv")),
               [&](std::ostream& out) { write_plotdata_csv(out, result); });
  return 0;
}

struct TheoryOpts
{
  std::size_t seeds = 10;
  std::size_t n_per_cluster = 50;
  std::uint64_t seed = 0;
  std::uint64_t checked_steps = 10'000;
  bool mutate_no_blur = false;
  std::string out;
  KernelOpts k;
};

int cmd_theorycheck(const Common& common, const TheoryOpts& o)
{
  TheorySuiteOptions t;
  t.seeds = o.seeds;
  t.n_per_cluster = o.n_per_cluster;
  t.master_seed = o.seed;
  t.profile = Profile::from_name(o.k.kernel);
  t.schedule = o.k.schedule();
  t.bandwidth = o.k.h;
  t.max_iterations = o.k.max_iter;
  t.convergence_threshold = o.k.tol;
  t.checked_steps = o.checked_steps;
  t.shift_against_origin = o.mutate_no_blur;
  const TheorySuiteReport report = run_theory_suite(t);

  auto emit = [&](std::ostream& s) {
    for (const CheckResult& c : report.checks) {
      char line[96];
      std::snprintf(line, sizeof line, "%-28s %-4s %10zu  ", c.name.c_str(), c.passed ? "PASS" : "FAIL",
                    c.checked);
      s << line << c.detail << '\n';
    }
    s << (report.passed() ? "all checks passed" : "theory checks FAILED") << '\n';
  };
  emit(std::cout);
  if (!o.out.empty())
    write_file(resolve(common, o.out), emit);
  return report.passed() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Mean-shift clustering lab: MS, BMS, SMS and doubly stochastic mean-shift"};
  // "--h" is the bandwidth flag, so help is long-form only.
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--config", common.config_path, "Flat 'key = value' file; flags override its values");
  app.add_option("--out-dir", common.out_dir, "Directory for relative output paths");
  app.add_flag("-v,--verbose", common.verbose, "Progress messages on stderr");

  auto* gen = app.add_subcommand("gen", "Write a labelled three-component Gaussian mixture");
  std::size_t gen_n = 100;
  std::uint64_t gen_seed = 0;
  std::string gen_out = "data.csv";
  std::string gen_spread = "variance";
  gen->add_option("--n-per-cluster", gen_n, "Points per component")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed);
  gen->add_option("--out", gen_out);
  gen->add_option("--spread", gen_spread, "Read 0.65 as variance or stddev")
    ->check(CLI::IsMember({"variance", "stddev"}));

  auto* run_cmd = app.add_subcommand("run", "Cluster one point set");
  RunOpts run_opts;
  run_cmd->add_option("--algo", run_opts.algo)->check(CLI::IsMember({"ms", "bms", "sms", "dsms"}));
  run_cmd->add_option("--input", run_opts.input, "Points CSV")->required();
  run_cmd->add_option("--seed", run_opts.seed);
  run_cmd->add_option("--trace", run_opts.trace)->check(CLI::IsMember({"off", "shifts", "full"}));
  run_cmd->add_option("--out", run_opts.out, "Trace JSON");
  run_cmd->add_option("--clusters", run_opts.clusters, "Assignments CSV (default <out>.clusters.csv)");
  run_cmd->add_option("--metrics", run_opts.metrics, "Metrics record (default <out>.metrics.txt)");
  run_cmd->add_option("--final", run_opts.final_state, "Final state CSV");
  run_cmd->add_option("--labeled", run_opts.labeled, "Label column: auto (from header), yes, no")
    ->check(CLI::IsMember({"auto", "yes", "no"}));
  run_cmd->add_option("--diagnosis-fraction", run_opts.diagnosis_fraction)->check(CLI::Range(1e-9, 1.0));
  run_cmd->add_option("--merge-radius", run_opts.merge_radius, "Override h/2 (h_min/2 for DSMS)");
  run_opts.k.add_to(*run_cmd);

  auto* metrics_cmd = app.add_subcommand("metrics", "Score an assignment against true labels");
  std::string m_assign;
  std::string m_truth;
  std::string m_out;
  metrics_cmd->add_option("--assign", m_assign, "index,cluster CSV")->required();
  metrics_cmd->add_option("--truth", m_truth, "Labelled points CSV")->required();
  metrics_cmd->add_option("--out", m_out, "Metrics record (default stdout)");

  auto* sweep_cmd = app.add_subcommand("sweep", "Repeated seeded runs with confidence intervals");
  SweepOpts sweep_opts;
  sweep_cmd->add_option("--kind", sweep_opts.kind)->check(CLI::IsMember({"sparse", "range", "imbalance", "count"}));
  sweep_cmd->add_option("--reps", sweep_opts.reps)->check(CLI::Range(2, 1'000'000));
  sweep_cmd->add_option("--seed", sweep_opts.seed);
  sweep_cmd->add_option("--out", sweep_opts.out);
  sweep_cmd->add_flag("--emit-plotdata", sweep_opts.plotdata, "Also write <out>.plotdata.csv (long format)");
  sweep_cmd->add_option("--grid", sweep_opts.grid, "Comma-separated sweep values");
  sweep_cmd->add_option("--workers", sweep_opts.workers, "Worker threads (default MSLAB_WORKERS or 1)");
  sweep_cmd->add_option("--ci", sweep_opts.ci)->check(CLI::IsMember({"t", "bootstrap"}));
  sweep_cmd->add_option("--spread", sweep_opts.spread)->check(CLI::IsMember({"variance", "stddev"}));
  sweep_cmd->add_option("--range-floor", sweep_opts.range_floor)->check(CLI::PositiveNumber);
  sweep_opts.k.add_to(*sweep_cmd);

  auto* theory_cmd = app.add_subcommand("theorycheck", "Run the invariant suite");
  TheoryOpts theory_opts;
  theory_cmd->add_option("--seeds", theory_opts.seeds)->check(CLI::PositiveNumber);
  theory_cmd->add_option("--n-per-cluster", theory_opts.n_per_cluster)->check(CLI::PositiveNumber);
  theory_cmd->add_option("--seed", theory_opts.seed);
  theory_cmd->add_option("--checked-steps", theory_opts.checked_steps, "Steps per run with full objective checks");
  theory_cmd->add_flag("--mutate-no-blur", theory_opts.mutate_no_blur,
                       "Shift against the original sample (should fail the ascent check)");
  theory_cmd->add_option("--out", theory_opts.out, "Also write the table here");
  theory_opts.k.add_to(*theory_cmd);

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = merge_config(args);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (*gen)
      return cmd_gen(common, gen_n, gen_seed, gen_out, gen_spread);
    if (*run_cmd)
      return cmd_run(common, run_opts);
    if (*metrics_cmd)
      return cmd_metrics(common, m_assign, m_truth, m_out);
    if (*sweep_cmd)
      return cmd_sweep(common, sweep_opts);
    if (*theory_cmd)
      return cmd_theorycheck(common, theory_opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
