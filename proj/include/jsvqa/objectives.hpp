#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jsvqa/ising.hpp"
#include "jsvqa/statevector.hpp"

namespace jsvqa {

// CVaR quantile alpha in (0, 1], kept as an exact decimal fraction so that
// ceil(alpha * K) never flips on floating-point boundaries (e.g. alpha = 0.5,
// K = 1000).
struct Quantile {
  long long num = 1;
  long long den = 1;

  static Quantile parse(const std::string& text);  // decimal like "0.5" or "1"
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  int tail_count(int shots) const;  // ceil(alpha * K), always >= 1
  std::string str() const;
};

// Mean of the lowest ceil(alpha K) energies in the sample.
double cvar(std::vector<double> energies, const Quantile& alpha);

double vqe_objective(std::vector<double> energies, const Quantile& alpha);
double qaoa_objective(std::vector<double> energies, const Quantile& alpha);
// Half the sample mean; the 1/2 is part of the definition and sets the
// gradient scale of the imaginary-time update.
double varqite_objective(const std::vector<double>& energies);

// CVaR of the exact Born distribution (quantile alpha as a real number),
// with fractional weight on the boundary energy level.
double exact_cvar(const StateVector& state, const std::vector<double>& energy_table,
                  double alpha);

// Inverse spectral filter f(E) = (E + shift)^(-tau). The shift must make
// every energy it is applied to strictly positive.
struct FilterConfig {
  double tau = 1.0;
  double positivity_shift = 0.0;
};

double apply_filter(double energy, const FilterConfig& config);

// Shift E -> E - E_lb + 1 keeping shifted energies >= 1 on the spectrum.
// JSP QUBOs take E_lb = 0 (all cost terms are non-negative); the generic
// fallback is the coefficient-sum lower bound of the Hamiltonian.
double coefficient_lower_bound(const IsingHamiltonian& h);
double positivity_shift_for(const IsingHamiltonian& h, std::optional<double> energy_lower_bound);

struct FilteredMoments {
  double f_mean = 0.0;   // <F>
  double f2_mean = 0.0;  // <F^2>
};

FilteredMoments filtered_moments(const std::vector<double>& energies,
                                 const FilterConfig& config);

// 1 - Re<psi(theta)|F|psi_prev> / sqrt(<F^2>_prev), the squared-distance
// objective evaluated exactly from amplitudes (diagnostic / exact mode).
double fvqe_objective_exact(const StateVector& state_now, const StateVector& state_prev,
                            const IsingHamiltonian& h, const FilterConfig& config);

enum class EstimatorMode { Exact, Sampled };

// Energy ensemble behind a moment estimate: a shot sample (uniform weights)
// or the exact Born distribution. Log-energies are cached so the tau grid can
// be scanned cheaply.
struct EnergyEnsemble {
  std::vector<double> log_shifted;  // log(E_k + shift)
  std::vector<double> weights;      // empty = uniform 1/K
  double mean_energy = 0.0;         // unshifted mean

  double filtered_mean(double tau) const;    // <F>
  double filtered_sq_mean(double tau) const; // <F^2>
};

EnergyEnsemble make_sampled_ensemble(const std::vector<double>& energies, double shift);
EnergyEnsemble make_exact_ensemble(const StateVector& state,
                                   const std::vector<double>& energy_table, double shift);

// One optimization step's worth of circuit evaluations: the ensemble at theta
// plus the 2*dim parameter-shift ensembles. The filter is classical
// post-processing, so gradients for every tau on the grid reuse these.
struct FvqeStep {
  int dim = 0;
  double shift = 0.0;
  EnergyEnsemble at_theta;
  std::vector<EnergyEnsemble> shifted;  // [2j] = +pi/2 e_j, [2j+1] = -pi/2 e_j

  // Component j: -(<F>(theta + pi/2 e_j) - <F>(theta - pi/2 e_j)) / (4 sqrt(<F^2>(theta))).
  std::vector<double> gradient(double tau) const;
  double gradient_inf_norm(double tau) const;
};

FvqeStep collect_fvqe_step(const HardwareEfficientAnsatz& ansatz, std::span<const double> theta,
                           const std::vector<double>& energy_table, double shift,
                           EstimatorMode mode, int shots, std::uint64_t seed);

std::vector<double> fvqe_gradient(const HardwareEfficientAnsatz& ansatz,
                                  std::span<const double> theta, const IsingHamiltonian& h,
                                  const FilterConfig& config, EstimatorMode mode, int shots,
                                  std::uint64_t seed);

struct TauGrid {
  double step = 0.1;
  double max = 10.0;

  std::vector<double> values() const;  // {step, 2 step, ..., max}
};

// Largest grid tau whose estimated gradient inf-norm stays within
// target_norm; the smallest grid value if every tau exceeds it.
double adapt_tau(const FvqeStep& step, const TauGrid& grid, double target_norm);
double adapt_tau(const HardwareEfficientAnsatz& ansatz, std::span<const double> theta,
                 const IsingHamiltonian& h, const TauGrid& grid, double target_norm,
                 double shift, EstimatorMode mode, int shots, std::uint64_t seed);

}  // namespace jsvqa
