#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jsvqa/cobyla.hpp"
#include "jsvqa/ising.hpp"
#include "jsvqa/objectives.hpp"
#include "jsvqa/statevector.hpp"

namespace jsvqa {

enum class Algorithm { Vqe, Qaoa, VarQite, Fvqe };
enum class RescaleMode { MinMax, MaxOnly };
enum class AMatrixMode { Tikhonov, PseudoInverse };

const char* algorithm_name(Algorithm a);
Algorithm parse_algorithm(const std::string& name);  // throws ConfigError

struct RunConfig {
  Algorithm algorithm = Algorithm::Vqe;
  int layers = 2;
  int shots = 1000;
  Quantile alpha = {1, 2};  // 0.5
  std::uint64_t seed = 1;
  int max_iterations = 100;
  double eta = 1.0;           // F-VQE learning rate
  double dtau = 0.01;         // VarQITE imaginary-time step
  double lambda = 1e-4;       // Tikhonov regularization for A
  double gc = 0.1;            // F-VQE target gradient inf-norm
  TauGrid tau_grid;           // {0.1, 0.2, ..., 10}
  EstimatorMode mode = EstimatorMode::Sampled;
  RescaleMode rescale = RescaleMode::MinMax;
  EntanglerPattern pattern = EntanglerPattern::Brickwork;
  AMatrixMode a_mode = AMatrixMode::Tikhonov;
  double sv_cutoff = 1e-6;    // pseudo-inverse eigenvalue cutoff (relative)
  double rho_begin = 0.5;     // COBYLA trust radii
  double rho_end = 1e-4;
  // Known lower bound on the spectrum, used for the filter positivity shift;
  // instance-derived problems set 0, otherwise a coefficient bound is used.
  std::optional<double> energy_lower_bound;

  void validate() const;  // throws ConfigError
};

// One row of a trace. For the COBYLA algorithms an iteration is one objective
// evaluation; for the gradient methods it is the state before one parameter
// update. epsilon/pgs are exact diagnostics of the simulated state; the
// objective and mean energy come from the run's estimator.
struct IterationRecord {
  int iteration = 0;
  long long evaluations = 0;  // cumulative prepare-and-estimate circuit runs
  double objective = 0.0;
  double epsilon = 0.0;
  double pgs = 0.0;
  double mean_energy = 0.0;
  std::optional<double> tau;        // F-VQE only
  std::optional<double> grad_norm;  // gradient methods only
  std::optional<double> wall_ms;
};

struct Trace {
  RunConfig config;
  std::string fingerprint;  // instance content hash; empty for bare Hamiltonians
  std::vector<IterationRecord> records;
  std::vector<double> terminal_params;
  double final_epsilon = 0.0;
  double final_pgs = 0.0;
  std::string termination;        // "rho_end" | "max_iterations" | "completed"
  std::string truncation_error;   // non-empty when the run aborted mid-way
};

// A Hamiltonian bundled with its exact extrema (and hence ground set).
struct Problem {
  IsingHamiltonian hamiltonian;
  SpectrumExtrema extrema;
  std::optional<double> energy_lower_bound;
  std::string fingerprint;
};

Problem make_problem(IsingHamiltonian h, std::optional<double> energy_lower_bound = {},
                     std::string fingerprint = {}, int enumeration_limit = kDefaultEnumerationLimit);

// Exact (epsilon, P_gs) of a state against precomputed extrema.
std::pair<double, double> compute_metrics(const StateVector& state,
                                          const std::vector<double>& energy_table,
                                          const SpectrumExtrema& extrema, RescaleMode rescale);

// A_ij = Re <d_i psi | d_j psi>. Exact mode evaluates the derivative-state
// overlaps; sampled mode emulates the Hadamard test with Bernoulli draws at
// the exact success probability.
std::vector<double> mclachlan_matrix(const HardwareEfficientAnsatz& ansatz,
                                     std::span<const double> theta, EstimatorMode mode,
                                     int shots, std::uint64_t seed);

Trace run_vqe(const Problem& problem, const RunConfig& config);
Trace run_qaoa(const Problem& problem, const RunConfig& config);
Trace run_varqite(const Problem& problem, const RunConfig& config);
Trace run_fvqe(const Problem& problem, const RunConfig& config);
Trace run_algorithm(const Problem& problem, const RunConfig& config);

}  // namespace jsvqa
