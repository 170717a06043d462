#include "jsvqa/algorithms.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "jsvqa/errors.hpp"
#include "jsvqa/linalg.hpp"
#include "jsvqa/rng.hpp"

namespace jsvqa {

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::Vqe: return "vqe";
    case Algorithm::Qaoa: return "qaoa";
    case Algorithm::VarQite: return "varqite";
    case Algorithm::Fvqe: return "fvqe";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "vqe") return Algorithm::Vqe;
  if (name == "qaoa") return Algorithm::Qaoa;
  if (name == "varqite") return Algorithm::VarQite;
  if (name == "fvqe") return Algorithm::Fvqe;
  throw ConfigError("unknown algorithm '" + name + "' (expected vqe|qaoa|varqite|fvqe)");
}

void RunConfig::validate() const {
  if (layers < 0) throw ConfigError("layers must be >= 0");
  if (algorithm == Algorithm::Qaoa && layers < 1) throw ConfigError("qaoa needs layers >= 1");
  if (mode == EstimatorMode::Sampled && shots < 1)
    throw ConfigError("shots must be >= 1 in sampled mode");
  if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  if (!(eta > 0.0)) throw ConfigError("eta must be > 0");
  if (!(dtau > 0.0)) throw ConfigError("dtau must be > 0");
  if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
  if (!(gc > 0.0)) throw ConfigError("gc must be > 0");
  if (!(tau_grid.step > 0.0) || !(tau_grid.max >= tau_grid.step))
    throw ConfigError("tau grid must satisfy 0 < step <= max");
  if (sv_cutoff < 0.0) throw ConfigError("sv-cutoff must be >= 0");
  if (!(rho_begin > rho_end) || !(rho_end > 0.0))
    throw ConfigError("need rho_begin > rho_end > 0");
}

Problem make_problem(IsingHamiltonian h, std::optional<double> energy_lower_bound,
                     std::string fingerprint, int enumeration_limit) {
  SpectrumExtrema extrema = spectrum_extrema(h, enumeration_limit);
  return {std::move(h), std::move(extrema), energy_lower_bound, std::move(fingerprint)};
}

std::pair<double, double> compute_metrics(const StateVector& state,
                                          const std::vector<double>& energy_table,
                                          const SpectrumExtrema& extrema, RescaleMode rescale) {
  const double mean = exact_expectation(state, energy_table);
  const double eps = rescale == RescaleMode::MinMax ? scaled_energy(mean, extrema)
                                                    : scaled_energy_max_only(mean, extrema);
  // Accumulation noise in the expectation can land a hair outside [0, 1].
  const double pgs = ground_state_overlap(state, extrema.ground_set);
  return {std::clamp(eps, 0.0, 1.0), std::clamp(pgs, 0.0, 1.0)};
}

std::vector<double> mclachlan_matrix(const HardwareEfficientAnsatz& ansatz,
                                     std::span<const double> theta, EstimatorMode mode,
                                     int shots, std::uint64_t seed) {
  const int dim = ansatz.param_count();
  // All dim derivative states are held at once; refuse absurd footprints.
  const double bytes = static_cast<double>(dim) * std::ldexp(16.0, ansatz.num_qubits);
  if (bytes > 4e9)
    throw std::invalid_argument(
        "mclachlan_matrix: derivative-state cache would exceed 4 GB at this size");
  std::vector<StateVector> derivatives;
  derivatives.reserve(dim);
  for (int j = 0; j < dim; ++j) derivatives.push_back(derivative_state(ansatz, theta, j));

  std::vector<double> a(dim * dim, 0.0);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) {
      double re = 0.0;
      for (std::uint64_t z = 0; z < derivatives[i].amp.size(); ++z)
        re += (std::conj(derivatives[i].amp[z]) * derivatives[j].amp[z]).real();
      if (mode == EstimatorMode::Sampled) {
        // Hadamard-test emulation on the unit-norm derivative circuits: the
        // ancilla success probability is (1 + 4 A_ij) / 2.
        const double p = std::clamp((1.0 + 4.0 * re) / 2.0, 0.0, 1.0);
        SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(i) * dim + j));
        int hits = 0;
        for (int k = 0; k < shots; ++k)
          if (rng.next_double() < p) ++hits;
        re = (2.0 * hits / shots - 1.0) / 4.0;
      }
      a[i * dim + j] = re;
      a[j * dim + i] = re;
    }
  return a;
}

namespace {

struct RunState {
  const Problem& problem;
  const RunConfig& config;
  std::vector<double> energy_table;
  HardwareEfficientAnsatz ansatz;
  Trace trace;
  long long evaluations = 0;
  std::chrono::steady_clock::time_point started;

  RunState(const Problem& p, const RunConfig& c)
      : problem(p), config(c), energy_table(diagonal_energies(p.hamiltonian)) {
    c.validate();
    ansatz = {p.hamiltonian.num_qubits, c.layers, c.pattern};
    trace.config = c;
    trace.fingerprint = p.fingerprint;
    started = std::chrono::steady_clock::now();
  }

  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
        .count();
  }

  std::vector<double> sampled_energies(const StateVector& state, std::uint64_t stream_seed) const {
    std::vector<double> energies;
    energies.reserve(config.shots);
    for (std::uint64_t z : sample(state, config.shots, stream_seed))
      energies.push_back(energy_table[z]);
    return energies;
  }

  void record(int iteration, double objective, const StateVector& state, double mean_energy,
              std::optional<double> tau, std::optional<double> grad_norm) {
    auto [eps, pgs] = compute_metrics(state, energy_table, problem.extrema, config.rescale);
    trace.records.push_back({iteration, evaluations, objective, eps, pgs, mean_energy, tau,
                             grad_norm, elapsed_ms()});
  }

  void finish(const StateVector& terminal_state, std::vector<double> params,
              std::string termination) {
    auto [eps, pgs] = compute_metrics(terminal_state, energy_table, problem.extrema,
                                      config.rescale);
    trace.final_epsilon = eps;
    trace.final_pgs = pgs;
    trace.terminal_params = std::move(params);
    trace.termination = std::move(termination);
  }

  double filter_shift() const {
    return positivity_shift_for(problem.hamiltonian,
                                config.energy_lower_bound ? config.energy_lower_bound
                                                          : problem.energy_lower_bound);
  }
};

double inf_norm(const std::vector<double>& v) {
  double norm = 0.0;
  for (double x : v) norm = std::max(norm, std::abs(x));
  return norm;
}

// Parameter-shift gradient of the mean energy: d<H>/dtheta_j =
// (<H>(theta + pi/2 e_j) - <H>(theta - pi/2 e_j)) / 2.
std::vector<double> mean_energy_gradient(RunState& rs, std::span<const double> theta,
                                         std::uint64_t base_seed) {
  const int dim = rs.ansatz.param_count();
  std::vector<double> work(theta.begin(), theta.end()), grad(dim);
  for (int j = 0; j < dim; ++j) {
    const double original = work[j];
    double plus, minus;
    work[j] = original + M_PI / 2.0;
    {
      const StateVector s = prepare_he_state(rs.ansatz, work);
      plus = rs.config.mode == EstimatorMode::Exact
                 ? exact_expectation(s, rs.energy_table)
                 : [&] {
                     const auto e = rs.sampled_energies(s, derive_seed(base_seed, 2 * j + 1));
                     return std::accumulate(e.begin(), e.end(), 0.0) / e.size();
                   }();
    }
    work[j] = original - M_PI / 2.0;
    {
      const StateVector s = prepare_he_state(rs.ansatz, work);
      minus = rs.config.mode == EstimatorMode::Exact
                  ? exact_expectation(s, rs.energy_table)
                  : [&] {
                      const auto e = rs.sampled_energies(s, derive_seed(base_seed, 2 * j + 2));
                      return std::accumulate(e.begin(), e.end(), 0.0) / e.size();
                    }();
    }
    work[j] = original;
    grad[j] = (plus - minus) / 2.0;
    rs.evaluations += 2;
  }
  return grad;
}

Trace run_cobyla_driver(const Problem& problem, const RunConfig& config, bool qaoa) {
  RunState rs(problem, config);
  const int num_qubits = problem.hamiltonian.num_qubits;

  std::vector<double> x0;
  if (qaoa) {
    SplitMix64 init_rng(derive_seed(config.seed, 0xA0A));
    x0.resize(2 * config.layers);
    for (double& v : x0) v = init_rng.next_double() * M_PI;
  } else {
    x0 = rs.ansatz.plus_state_params();
  }

  int eval_index = 0;
  auto objective = [&](std::span<const double> params) {
    StateVector state;
    if (qaoa) {
      QaoaParams qp;
      qp.beta.assign(params.begin(), params.begin() + config.layers);
      qp.gamma.assign(params.begin() + config.layers, params.end());
      state = prepare_qaoa_state(problem.hamiltonian, qp, rs.energy_table);
    } else {
      state = prepare_he_state(rs.ansatz, params);
    }
    double objective_value, mean_energy;
    if (config.mode == EstimatorMode::Exact) {
      objective_value = exact_cvar(state, rs.energy_table, config.alpha.value());
      mean_energy = exact_expectation(state, rs.energy_table);
    } else {
      const auto energies = rs.sampled_energies(state, derive_seed(config.seed, eval_index));
      objective_value = cvar(energies, config.alpha);
      mean_energy = std::accumulate(energies.begin(), energies.end(), 0.0) / energies.size();
    }
    rs.evaluations += 1;
    rs.record(eval_index, objective_value, state, mean_energy, std::nullopt, std::nullopt);
    ++eval_index;
    return objective_value;
  };

  CobylaResult result =
      cobyla_minimize(objective, x0, {config.rho_begin, config.rho_end, config.max_iterations});

  StateVector terminal;
  if (qaoa) {
    QaoaParams qp;
    qp.beta.assign(result.best_point.begin(), result.best_point.begin() + config.layers);
    qp.gamma.assign(result.best_point.begin() + config.layers, result.best_point.end());
    terminal = prepare_qaoa_state(problem.hamiltonian, qp, rs.energy_table);
  } else {
    terminal = prepare_he_state(rs.ansatz, result.best_point);
  }
  rs.finish(terminal, result.best_point, result.reached_rho_end ? "rho_end" : "max_iterations");
  (void)num_qubits;
  return rs.trace;
}

}  // namespace

Trace run_vqe(const Problem& problem, const RunConfig& config) {
  return run_cobyla_driver(problem, config, /*qaoa=*/false);
}

Trace run_qaoa(const Problem& problem, const RunConfig& config) {
  return run_cobyla_driver(problem, config, /*qaoa=*/true);
}

Trace run_varqite(const Problem& problem, const RunConfig& config) {
  RunState rs(problem, config);
  const int dim = rs.ansatz.param_count();
  std::vector<double> theta = rs.ansatz.plus_state_params();

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    const std::uint64_t base = derive_seed(config.seed, static_cast<std::uint64_t>(iter) + 1);
    const StateVector state = prepare_he_state(rs.ansatz, theta);
    double objective_value, mean_energy;
    if (config.mode == EstimatorMode::Exact) {
      mean_energy = exact_expectation(state, rs.energy_table);
      objective_value = 0.5 * mean_energy;
    } else {
      const auto energies = rs.sampled_energies(state, derive_seed(base, 0));
      objective_value = varqite_objective(energies);
      mean_energy = std::accumulate(energies.begin(), energies.end(), 0.0) / energies.size();
    }
    rs.evaluations += 1;

    std::vector<double> grad = mean_energy_gradient(rs, theta, base);
    for (double& g : grad) g *= 0.5;  // objective is half the mean energy

    const std::vector<double> a =
        mclachlan_matrix(rs.ansatz, theta, config.mode, config.shots,
                         derive_seed(base, 0xA11));
    rs.evaluations += config.mode == EstimatorMode::Exact
                          ? dim
                          : static_cast<long long>(dim) * (dim + 1) / 2;

    std::vector<double> direction;
    if (config.a_mode == AMatrixMode::Tikhonov) {
      std::vector<double> regularized = a;
      for (int i = 0; i < dim; ++i) regularized[i * dim + i] += config.lambda;
      if (!cholesky_solve(regularized, dim, grad, direction)) {
        rs.record(iter, objective_value, state, mean_energy, std::nullopt, inf_norm(grad));
        rs.trace.truncation_error =
            "varqite: A + lambda I not positive definite at iteration " + std::to_string(iter);
        rs.finish(state, theta, "aborted");
        return rs.trace;
      }
    } else {
      direction = pseudo_inverse_solve(a, dim, grad, config.sv_cutoff);
    }

    rs.record(iter, objective_value, state, mean_energy, std::nullopt, inf_norm(grad));
    for (int j = 0; j < dim; ++j) theta[j] -= direction[j] * config.dtau;
  }

  const StateVector terminal = prepare_he_state(rs.ansatz, theta);
  rs.finish(terminal, theta, "completed");
  return rs.trace;
}

Trace run_fvqe(const Problem& problem, const RunConfig& config) {
  RunState rs(problem, config);
  const int dim = rs.ansatz.param_count();
  const double shift = rs.filter_shift();
  std::vector<double> theta = rs.ansatz.plus_state_params();

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    const std::uint64_t base = derive_seed(config.seed, static_cast<std::uint64_t>(iter) + 1);
    const StateVector state = prepare_he_state(rs.ansatz, theta);
    const FvqeStep step = collect_fvqe_step(rs.ansatz, theta, rs.energy_table, shift,
                                            config.mode, config.shots, base);
    rs.evaluations += 2LL * dim + 1;

    const double tau = adapt_tau(step, config.tau_grid, config.gc);
    const std::vector<double> grad = step.gradient(tau);
    const double f2 = step.at_theta.filtered_sq_mean(tau);
    const double objective_value = 1.0 - step.at_theta.filtered_mean(tau) / std::sqrt(f2);

    rs.record(iter, objective_value, state, step.at_theta.mean_energy, tau, inf_norm(grad));
    for (int j = 0; j < dim; ++j) theta[j] -= config.eta * grad[j];
  }

  const StateVector terminal = prepare_he_state(rs.ansatz, theta);
  rs.finish(terminal, theta, "completed");
  return rs.trace;
}

Trace run_algorithm(const Problem& problem, const RunConfig& config) {
  switch (config.algorithm) {
    case Algorithm::Vqe: return run_vqe(problem, config);
    case Algorithm::Qaoa: return run_qaoa(problem, config);
    case Algorithm::VarQite: return run_varqite(problem, config);
    case Algorithm::Fvqe: return run_fvqe(problem, config);
  }
  throw ConfigError("unknown algorithm");
}

}  // namespace jsvqa
