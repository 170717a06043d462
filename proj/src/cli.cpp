#include "jsvqa/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "jsvqa/algorithms.hpp"
#include "jsvqa/errors.hpp"
#include "jsvqa/instance_io.hpp"
#include "jsvqa/jsp.hpp"
#include "jsvqa/trace_io.hpp"

namespace jsvqa {

namespace {

struct LoadedProblem {
  InstanceFile file;
  Qubo qubo;            // full assembly
  FixedQubo fixed;      // after applying the file's fix directives
  std::string fingerprint;
};

LoadedProblem load_problem(const std::string& path) {
  LoadedProblem lp;
  lp.file = load_instance(path);
  lp.qubo = assemble_qubo(lp.file.instance);
  lp.fixed = fix_variables(lp.qubo.form, lp.qubo.map, resolve_fixes(lp.file, lp.qubo.map));
  lp.fingerprint = fingerprint_file(path);
  return lp;
}

struct CliOptions {
  std::string instance_path;
  std::string algorithm;
  std::string preset;
  std::string out_path;
  std::string alpha;
  std::string mode;
  std::string rescale;
  std::string pattern;
  std::string a_mode;
  std::string seeds;
  int layers = 0;
  int shots = 0;
  int iterations = 0;
  std::uint64_t seed = 0;
  double eta = 0, dtau = 0, lambda = 0, gc = 0;
  int workers = 0;
  bool timings = false;
};

struct Preset {
  Algorithm algorithm;
  int layers;
  int shots;
  const char* alpha;
};

const std::map<std::string, Preset>& presets() {
  // Named defaults for the published settings: the 5-qubit comparison runs
  // (p=2, 1000 shots, CVaR alpha 0.5) and the larger single-layer fvqe runs.
  static const std::map<std::string, Preset> table = {
      {"paper-5q-vqe", {Algorithm::Vqe, 2, 1000, "0.5"}},
      {"paper-5q-qaoa", {Algorithm::Qaoa, 2, 1000, "0.5"}},
      {"paper-5q-varqite", {Algorithm::VarQite, 2, 1000, "1"}},
      {"paper-5q-fvqe", {Algorithm::Fvqe, 2, 1000, "1"}},
      {"paper-10q-fvqe", {Algorithm::Fvqe, 1, 500, "1"}},
      {"paper-12q-fvqe", {Algorithm::Fvqe, 1, 550, "1"}},
      {"paper-16q-fvqe", {Algorithm::Fvqe, 1, 650, "1"}},
      {"paper-23q-fvqe", {Algorithm::Fvqe, 1, 450, "1"}},
  };
  return table;
}

bool set_on(const CLI::App* cmd, const std::string& name) {
  const CLI::Option* option = cmd->get_option_no_throw(name);
  return option != nullptr && option->count() > 0;
}

Quantile parse_alpha(const std::string& text) {
  try {
    return Quantile::parse(text);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

RunConfig build_config(const CliOptions& opt, const CLI::App* cmd) {
  RunConfig config;
  bool have_algorithm = false;
  if (!opt.preset.empty()) {
    const auto it = presets().find(opt.preset);
    if (it == presets().end()) throw ConfigError("unknown preset '" + opt.preset + "'");
    config.algorithm = it->second.algorithm;
    config.layers = it->second.layers;
    config.shots = it->second.shots;
    config.alpha = parse_alpha(it->second.alpha);
    have_algorithm = true;
  }
  if (set_on(cmd, "--algorithm")) {
    config.algorithm = parse_algorithm(opt.algorithm);
    have_algorithm = true;
  }
  if (!have_algorithm) throw ConfigError("missing --algorithm (or --preset)");
  if (set_on(cmd, "--layers")) config.layers = opt.layers;
  if (set_on(cmd, "--shots")) config.shots = opt.shots;
  if (set_on(cmd, "--alpha")) config.alpha = parse_alpha(opt.alpha);
  if (set_on(cmd, "--seed")) config.seed = opt.seed;
  if (set_on(cmd, "--iterations")) config.max_iterations = opt.iterations;
  if (set_on(cmd, "--eta")) config.eta = opt.eta;
  if (set_on(cmd, "--dtau")) config.dtau = opt.dtau;
  if (set_on(cmd, "--lambda")) config.lambda = opt.lambda;
  if (set_on(cmd, "--gc")) config.gc = opt.gc;
  if (set_on(cmd, "--mode")) {
    if (opt.mode == "exact") config.mode = EstimatorMode::Exact;
    else if (opt.mode == "sampled") config.mode = EstimatorMode::Sampled;
    else throw ConfigError("--mode must be exact or sampled");
  }
  if (set_on(cmd, "--rescale")) {
    if (opt.rescale == "minmax") config.rescale = RescaleMode::MinMax;
    else if (opt.rescale == "max") config.rescale = RescaleMode::MaxOnly;
    else throw ConfigError("--rescale must be minmax or max");
  }
  if (set_on(cmd, "--pattern")) {
    if (opt.pattern == "brickwork") config.pattern = EntanglerPattern::Brickwork;
    else if (opt.pattern == "chain") config.pattern = EntanglerPattern::Chain;
    else throw ConfigError("--pattern must be brickwork or chain");
  }
  if (set_on(cmd, "--a-mode")) {
    if (opt.a_mode == "tikhonov") config.a_mode = AMatrixMode::Tikhonov;
    else if (opt.a_mode == "pinv") config.a_mode = AMatrixMode::PseudoInverse;
    else throw ConfigError("--a-mode must be tikhonov or pinv");
  }
  // Instance-derived QUBOs are non-negative term by term.
  config.energy_lower_bound = 0.0;
  config.validate();
  return config;
}

Problem to_problem(const LoadedProblem& lp, int limit = kDefaultEnumerationLimit) {
  const int free_vars = lp.fixed.map.size();
  if (free_vars > limit)
    throw ConfigError("instance has " + std::to_string(free_vars) +
                      " free variables, above the enumeration limit " + std::to_string(limit) +
                      "; add \"fix\" directives to reduce it");
  if (free_vars < 1) throw ConfigError("instance has no free variables after fixing");
  IsingHamiltonian h = qubo_to_ising(lp.fixed.form, free_vars);
  return make_problem(std::move(h), 0.0, lp.fingerprint, limit);
}

void count_prefix(const VariableMap& map, long long& real_vars, long long& dummy_vars) {
  real_vars = dummy_vars = 0;
  for (const auto& v : map.descriptors())
    (v.kind == VarDesc::Kind::Real ? real_vars : dummy_vars) += 1;
}

int cmd_info(const std::string& path, std::ostream& out) {
  const LoadedProblem lp = load_problem(path);
  const JspInstance& inst = lp.file.instance;
  out << "instance " << path << "\n";
  out << "  jobs J = " << inst.num_jobs << ", machines M = " << inst.num_machines << "\n";
  out << "  idle budgets e =";
  for (int e : inst.idle_budget) out << ' ' << e;
  out << "\n";
  out << "  penalty weight p = " << inst.penalty_weight
      << (lp.file.penalty_auto ? " (auto)" : "") << "\n";
  const VariableCounts counts = count_variables(inst.num_jobs, inst.num_machines, inst.idle_budget);
  out << "  variables: N_x = " << counts.real_vars << ", N_y = " << counts.dummy_vars
      << ", N = " << counts.total << "\n";
  long long free_x = 0, free_y = 0;
  count_prefix(lp.fixed.map, free_x, free_y);
  out << "  after fixing " << lp.file.fixes.size() << " directives: N_x = " << free_x
      << ", N_y = " << free_y << ", N = " << free_x + free_y << "\n";
  const VariableCounts worst = worst_case_variables(inst.num_jobs, inst.num_machines);
  out << "  worst-case bound at this (J, M): N = " << worst.total
      << " (e_m = (m-1)(J-1))\n";
  out << "  fingerprint " << lp.fingerprint << "\n";
  return 0;
}

std::string render_bits(const std::vector<std::uint8_t>& bits) {
  std::string s;
  s.reserve(bits.size());
  for (auto b : bits) s.push_back(b ? '1' : '0');
  return s;  // variable 0 first
}

void print_schedule(const JspInstance& inst, const VariableMap& map,
                    const std::vector<std::uint8_t>& bits, std::ostream& out) {
  for (int m = 1; m <= inst.num_machines; ++m) {
    out << "    machine " << m << ":";
    const int budget = inst.idle_budget[m - 1];
    for (int t = 1; t <= inst.horizon(m); ++t) {
      std::vector<int> jobs_here;
      for (int j = 1; j <= inst.num_jobs; ++j)
        if (bits[map.real_index(m, j, t)]) jobs_here.push_back(j);
      bool dummy_here = false;
      if (t <= budget && map.contains({VarDesc::Kind::Dummy, m, 0, t}))
        dummy_here = bits[map.dummy_index(m, t)];
      else if (t > inst.num_jobs && map.contains({VarDesc::Kind::Dummy, m, 0, t - inst.num_jobs}))
        dummy_here = !bits[map.dummy_index(m, t - inst.num_jobs)];
      out << ' ';
      if (jobs_here.size() == 1 && !dummy_here) out << 'J' << jobs_here.front();
      else if (jobs_here.empty() && dummy_here) out << "--";
      else if (jobs_here.empty()) out << "??";
      else {
        out << '!';
        for (std::size_t k = 0; k < jobs_here.size(); ++k)
          out << (k ? "+" : "") << 'J' << jobs_here[k];
      }
    }
    out << "\n";
  }
}

int cmd_solve_exact(const std::string& path, const std::string& out_path, std::ostream& out) {
  const LoadedProblem lp = load_problem(path);
  const int free_vars = lp.fixed.map.size();
  if (free_vars > kDefaultEnumerationLimit)
    throw ConfigError("instance has " + std::to_string(free_vars) +
                      " free variables, above the enumeration limit " +
                      std::to_string(kDefaultEnumerationLimit) +
                      "; add \"fix\" directives to reduce it");
  const BruteForceResult result = brute_force_solve(lp.fixed.form, free_vars);
  out << "free variables: " << free_vars << "\n";
  out << "E_min = " << result.min_value << "\n";
  out << "E_max = " << result.max_value << "\n";
  out << "ground set size = " << result.ground_set.size() << "\n";
  int shown = 0;
  for (std::uint64_t code : result.ground_set) {
    std::vector<std::uint8_t> free_bits(free_vars);
    for (int i = 0; i < free_vars; ++i) free_bits[i] = code >> i & 1;
    const auto full = lp.fixed.reduction.complete(free_bits);
    out << "  minimizer " << ++shown << ": bits=" << render_bits(free_bits) << "\n";
    print_schedule(lp.file.instance, lp.qubo.map, full, out);
    const ScheduleCost sc = evaluate_schedule_cost(lp.file.instance, lp.qubo.map, full);
    if (sc.feasible)
      out << "    feasible, schedule cost = " << sc.cost << "\n";
    else
      out << "    INFEASIBLE (" << constraint_family_name(sc.violated)
          << "); penalty weight too small?\n";
    if (shown >= 32 && static_cast<std::size_t>(shown) < result.ground_set.size()) {
      out << "  ... (" << result.ground_set.size() - shown << " more minimizers)\n";
      break;
    }
  }
  if (!out_path.empty()) {
    std::ofstream gs(out_path, std::ios::binary);
    if (!gs) throw std::runtime_error(out_path + ": cannot open for writing");
    gs << "# ground set of " << path << " (free-variable bitstrings, variable 0 first)\n";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", result.min_value);
    gs << "# E_min " << buf << "\n";
    for (std::uint64_t code : result.ground_set) {
      std::vector<std::uint8_t> free_bits(free_vars);
      for (int i = 0; i < free_vars; ++i) free_bits[i] = code >> i & 1;
      gs << render_bits(free_bits) << "\n";
    }
    out << "ground set written to " << out_path << "\n";
  }
  return 0;
}

void print_summary(const Trace& trace, const std::string& trace_path, std::ostream& out) {
  out << "run algorithm=" << algorithm_name(trace.config.algorithm)
      << " seed=" << trace.config.seed << " iterations=" << trace.records.size()
      << " evaluations=" << (trace.records.empty() ? 0 : trace.records.back().evaluations)
      << " final_epsilon=" << trace.final_epsilon << " final_pgs=" << trace.final_pgs
      << " termination=" << trace.termination << " trace=" << trace_path << "\n";
}

int cmd_run(const CliOptions& opt, const CLI::App* cmd, std::ostream& out, std::ostream& err) {
  const RunConfig config = build_config(opt, cmd);
  const LoadedProblem lp = load_problem(opt.instance_path);
  const Problem problem = to_problem(lp);
  const std::string out_path = opt.out_path.empty() ? "trace.csv" : opt.out_path;
  const Trace trace = run_algorithm(problem, config);
  write_trace_csv(trace, out_path, opt.timings);
  if (!trace.truncation_error.empty()) {
    err << "run aborted: " << trace.truncation_error << " (partial trace in " << out_path
        << ")\n";
    return 4;
  }
  print_summary(trace, out_path, out);
  return 0;
}

std::string sweep_stem(const std::string& out_path) {
  if (out_path.empty()) return "sweep";
  if (out_path.size() > 4 && out_path.substr(out_path.size() - 4) == ".csv")
    return out_path.substr(0, out_path.size() - 4);
  return out_path;
}

int cmd_sweep(const CliOptions& opt, const CLI::App* cmd, std::ostream& out, std::ostream& err) {
  const RunConfig base_config = build_config(opt, cmd);
  const LoadedProblem lp = load_problem(opt.instance_path);
  const Problem problem = to_problem(lp);

  std::vector<std::uint64_t> seeds;
  {
    std::istringstream in(opt.seeds);
    std::string token;
    while (std::getline(in, token, ',')) {
      if (token.empty()) continue;
      try {
        seeds.push_back(std::stoull(token));
      } catch (const std::exception&) {
        throw ConfigError("--seeds: '" + token + "' is not a seed");
      }
    }
  }
  if (seeds.empty()) throw ConfigError("--seeds: need at least one seed");

  const std::string stem = sweep_stem(opt.out_path);
  struct SeedOutcome {
    Trace trace;
    std::string path;
    std::string error;
  };
  std::vector<SeedOutcome> outcomes(seeds.size());

  int worker_count = opt.workers > 0
                         ? opt.workers
                         : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  worker_count = std::min<int>(worker_count, static_cast<int>(seeds.size()));

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= seeds.size()) return;
      RunConfig config = base_config;
      config.seed = seeds[k];
      SeedOutcome& slot = outcomes[k];
      slot.path = stem + "_seed" + std::to_string(seeds[k]) + ".csv";
      try {
        slot.trace = run_algorithm(problem, config);
        write_trace_csv(slot.trace, slot.path, opt.timings);
        if (!slot.trace.truncation_error.empty()) slot.error = slot.trace.truncation_error;
      } catch (const std::exception& e) {
        slot.error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < worker_count; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();

  // Aggregate per-iteration mean and standard deviation over completed seeds.
  std::size_t longest = 0;
  for (const auto& o : outcomes)
    if (o.error.empty()) longest = std::max(longest, o.trace.records.size());
  std::ostringstream agg;
  agg << "# schema=jsvqa-aggregate-1\n";
  agg << "# algorithm=" << algorithm_name(base_config.algorithm) << " fingerprint="
      << lp.fingerprint << "\n";
  agg << "# seeds=" << opt.seeds << "\n";
  agg << "iteration,n_seeds,epsilon_mean,epsilon_std,pgs_mean,pgs_std\n";
  char buf[40];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (std::size_t i = 0; i < longest; ++i) {
    std::vector<double> eps_values, pgs_values;
    for (const auto& o : outcomes) {
      if (!o.error.empty() || i >= o.trace.records.size()) continue;
      eps_values.push_back(o.trace.records[i].epsilon);
      pgs_values.push_back(o.trace.records[i].pgs);
    }
    const int n = static_cast<int>(eps_values.size());
    if (n == 0) continue;
    auto all_equal = [](const std::vector<double>& v) {
      for (double x : v)
        if (x != v.front()) return false;
      return true;
    };
    auto mean_of = [&](const std::vector<double>& v) {
      if (all_equal(v)) return v.front();  // exact for deterministic columns
      double s = 0.0;
      for (double x : v) s += x;
      return s / n;
    };
    auto std_of = [&](const std::vector<double>& v, double mean) {
      if (all_equal(v)) return 0.0;
      double s = 0.0;
      for (double x : v) s += (x - mean) * (x - mean);
      return std::sqrt(s / n);
    };
    const double eps_mean = mean_of(eps_values), pgs_mean = mean_of(pgs_values);
    const double eps_std = std_of(eps_values, eps_mean);
    const double pgs_std = std_of(pgs_values, pgs_mean);
    agg << i << ',' << n << ',' << fmt(eps_mean) << ',' << fmt(eps_std) << ','
        << fmt(pgs_mean) << ',' << fmt(pgs_std) << "\n";
  }
  const std::string agg_path = stem + "_aggregate.csv";
  {
    std::ofstream f(agg_path, std::ios::binary);
    if (!f) throw std::runtime_error(agg_path + ": cannot open for writing");
    f << agg.str();
  }

  int failures = 0, high_pgs = 0, completers = 0;
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    const auto& o = outcomes[k];
    if (!o.error.empty()) {
      ++failures;
      err << "seed " << seeds[k] << " failed: " << o.error << "\n";
      continue;
    }
    ++completers;
    if (o.trace.final_pgs >= 0.75) ++high_pgs;
    print_summary(o.trace, o.path, out);
  }
  out << "sweep seeds=" << seeds.size() << " completed=" << completers
      << " final_pgs>=0.75: " << high_pgs << "/" << completers << " aggregate=" << agg_path
      << "\n";
  return failures == 0 ? 0 : 4;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"job-shop QUBO encoding and simulated variational quantum solvers"};
  app.require_subcommand(1);

  CliOptions opt;

  auto add_run_options = [&](CLI::App* cmd, bool sweep) {
    cmd->add_option("--instance", opt.instance_path, "instance JSON file")->required();
    cmd->add_option("--algorithm", opt.algorithm, "vqe|qaoa|varqite|fvqe");
    cmd->add_option("--preset", opt.preset, "named settings preset (see README)");
    cmd->add_option("--layers", opt.layers, "ansatz layers p");
    cmd->add_option("--shots", opt.shots, "measurement shots per estimate");
    cmd->add_option("--alpha", opt.alpha, "CVaR quantile as a decimal, e.g. 0.5");
    cmd->add_option("--iterations", opt.iterations, "iteration / evaluation budget");
    cmd->add_option("--eta", opt.eta, "F-VQE learning rate");
    cmd->add_option("--dtau", opt.dtau, "VarQITE imaginary-time step");
    cmd->add_option("--lambda", opt.lambda, "Tikhonov regularization for A");
    cmd->add_option("--gc", opt.gc, "F-VQE target gradient norm");
    cmd->add_option("--mode", opt.mode, "exact|sampled");
    cmd->add_option("--rescale", opt.rescale, "minmax|max energy rescaling");
    cmd->add_option("--pattern", opt.pattern, "brickwork|chain entangler");
    cmd->add_option("--a-mode", opt.a_mode, "tikhonov|pinv A-matrix inversion");
    cmd->add_option("--out", opt.out_path, "output CSV path");
    cmd->add_flag("--timings", opt.timings, "record wall-clock times in the CSV");
    if (sweep) {
      cmd->add_option("--seeds", opt.seeds, "comma-separated seed list")->required();
      cmd->add_option("--workers", opt.workers, "parallel seed workers");
    } else {
      cmd->add_option("--seed", opt.seed, "RNG seed");
    }
  };

  CLI::App* info = app.add_subcommand("info", "print instance shape and variable counts");
  info->add_option("--instance", opt.instance_path, "instance JSON file")->required();

  CLI::App* solve = app.add_subcommand("solve-exact", "enumerate the exact spectrum");
  solve->add_option("--instance", opt.instance_path, "instance JSON file")->required();
  solve->add_option("--out", opt.out_path, "write the ground set to this file");

  CLI::App* run = app.add_subcommand("run", "run one algorithm and write a CSV trace");
  add_run_options(run, false);

  CLI::App* sweep = app.add_subcommand("sweep", "run a seed sweep and aggregate");
  add_run_options(sweep, true);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (info->parsed()) return cmd_info(opt.instance_path, out);
    if (solve->parsed()) return cmd_solve_exact(opt.instance_path, opt.out_path, out);
    if (run->parsed()) return cmd_run(opt, run, out, err);
    if (sweep->parsed()) return cmd_sweep(opt, sweep, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InstanceError& e) {
    err << "instance error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}

}  // namespace jsvqa
