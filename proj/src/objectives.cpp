#include "jsvqa/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "jsvqa/rng.hpp"

namespace jsvqa {

Quantile Quantile::parse(const std::string& text) {
  const auto bad = [&] {
    throw std::invalid_argument("quantile: '" + text + "' is not a decimal in (0, 1]");
  };
  if (text.empty()) bad();
  const auto dot = text.find('.');
  const std::string whole = dot == std::string::npos ? text : text.substr(0, dot);
  const std::string frac = dot == std::string::npos ? "" : text.substr(dot + 1);
  if (whole.empty() && frac.empty()) bad();
  for (char c : whole + frac)
    if (c < '0' || c > '9') bad();
  if (frac.size() > 15) bad();

  Quantile q;
  q.num = 0;
  for (char c : whole) q.num = q.num * 10 + (c - '0');
  q.den = 1;
  for (char c : frac) {
    q.num = q.num * 10 + (c - '0');
    q.den *= 10;
  }
  const long long g = std::gcd(q.num, q.den);
  if (g > 0) { q.num /= g; q.den /= g; }
  if (q.num <= 0 || q.num > q.den) bad();
  return q;
}

int Quantile::tail_count(int shots) const {
  if (shots < 1) throw std::invalid_argument("quantile: shot count must be >= 1");
  const long long count = (num * shots + den - 1) / den;  // ceil(alpha K) exactly
  return static_cast<int>(std::max(count, 1LL));
}

std::string Quantile::str() const {
  if (den == 1) return std::to_string(num);
  // den carries only factors 2 and 5 (parsed from a decimal); extend the
  // fraction to denominator 10^width and print the digits after the point.
  long long n = num, d = den;
  int width = 0;
  while (d > 1) {
    if (d % 2 == 0) { d /= 2; n *= 5; }
    else { d /= 5; n *= 2; }
    ++width;
  }
  std::string digits = std::to_string(n);
  std::string out = "0.";
  if (static_cast<int>(digits.size()) < width) out += std::string(width - digits.size(), '0');
  out += digits;
  while (out.size() > 3 && out.back() == '0') out.pop_back();
  return out;
}

double cvar(std::vector<double> energies, const Quantile& alpha) {
  if (energies.empty()) throw std::invalid_argument("cvar: empty sample");
  const int keep = alpha.tail_count(static_cast<int>(energies.size()));
  std::nth_element(energies.begin(), energies.begin() + (keep - 1), energies.end());
  double total = 0.0;
  for (int k = 0; k < keep; ++k) total += energies[k];
  return total / keep;
}

double vqe_objective(std::vector<double> energies, const Quantile& alpha) {
  return cvar(std::move(energies), alpha);
}

double qaoa_objective(std::vector<double> energies, const Quantile& alpha) {
  return cvar(std::move(energies), alpha);
}

double varqite_objective(const std::vector<double>& energies) {
  if (energies.empty()) throw std::invalid_argument("varqite_objective: empty sample");
  const double mean = std::accumulate(energies.begin(), energies.end(), 0.0) /
                      static_cast<double>(energies.size());
  return 0.5 * mean;
}

double exact_cvar(const StateVector& state, const std::vector<double>& energy_table,
                  double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("exact_cvar: alpha out of range");
  if (energy_table.size() != state.amp.size())
    throw std::invalid_argument("exact_cvar: energy table size mismatch");
  std::vector<std::pair<double, double>> dist;  // (energy, probability)
  dist.reserve(state.amp.size());
  for (std::uint64_t z = 0; z < state.amp.size(); ++z) {
    const double p = std::norm(state.amp[z]);
    if (p > 0.0) dist.emplace_back(energy_table[z], p);
  }
  std::sort(dist.begin(), dist.end());
  double mass = 0.0, acc = 0.0;
  for (const auto& [e, p] : dist) {
    if (mass + p >= alpha) {
      acc += (alpha - mass) * e;
      return acc / alpha;
    }
    acc += p * e;
    mass += p;
  }
  return acc / std::max(mass, 1e-300);  // total mass short of alpha by rounding
}

double apply_filter(double energy, const FilterConfig& config) {
  if (!(config.tau > 0.0)) throw std::invalid_argument("filter: tau must be > 0");
  const double shifted = energy + config.positivity_shift;
  if (!(shifted > 0.0))
    throw std::domain_error("filter: shifted energy must be strictly positive");
  return std::pow(shifted, -config.tau);
}

double coefficient_lower_bound(const IsingHamiltonian& h) {
  double bound = h.h0;
  for (double v : h.h_lin) bound -= std::abs(v);
  for (const auto& [nn, v] : h.h_quad) { (void)nn; bound -= std::abs(v); }
  return bound;
}

double positivity_shift_for(const IsingHamiltonian& h,
                            std::optional<double> energy_lower_bound) {
  const double lb = energy_lower_bound ? *energy_lower_bound : coefficient_lower_bound(h);
  return 1.0 - lb;
}

FilteredMoments filtered_moments(const std::vector<double>& energies,
                                 const FilterConfig& config) {
  if (energies.empty()) throw std::invalid_argument("filtered_moments: empty sample");
  FilteredMoments m;
  for (double e : energies) {
    const double f = apply_filter(e, config);
    m.f_mean += f;
    m.f2_mean += f * f;
  }
  m.f_mean /= static_cast<double>(energies.size());
  m.f2_mean /= static_cast<double>(energies.size());
  return m;
}

double fvqe_objective_exact(const StateVector& state_now, const StateVector& state_prev,
                            const IsingHamiltonian& h, const FilterConfig& config) {
  if (state_now.num_qubits != state_prev.num_qubits || state_now.num_qubits != h.num_qubits)
    throw std::invalid_argument("fvqe_objective_exact: qubit count mismatch");
  double f2 = 0.0;
  double re_overlap = 0.0;
  for (std::uint64_t z = 0; z < state_prev.amp.size(); ++z) {
    const double f = apply_filter(ising_energy(h, z), config);
    f2 += std::norm(state_prev.amp[z]) * f * f;
    re_overlap += (std::conj(state_now.amp[z]) * state_prev.amp[z]).real() * f;
  }
  if (!(f2 > 0.0)) throw std::domain_error("fvqe_objective_exact: <F^2> is zero");
  return 1.0 - re_overlap / std::sqrt(f2);
}

double EnergyEnsemble::filtered_mean(double tau) const {
  double acc = 0.0;
  if (weights.empty()) {
    for (double l : log_shifted) acc += std::exp(-tau * l);
    return acc / static_cast<double>(log_shifted.size());
  }
  for (std::size_t k = 0; k < log_shifted.size(); ++k)
    acc += weights[k] * std::exp(-tau * log_shifted[k]);
  return acc;
}

double EnergyEnsemble::filtered_sq_mean(double tau) const { return filtered_mean(2.0 * tau); }

EnergyEnsemble make_sampled_ensemble(const std::vector<double>& energies, double shift) {
  if (energies.empty()) throw std::invalid_argument("ensemble: empty sample");
  // Shot samples over a diagonal Hamiltonian repeat few distinct levels, so
  // group duplicates; the tau-grid scan then costs one exp per level.
  std::vector<double> sorted = energies;
  std::sort(sorted.begin(), sorted.end());
  EnergyEnsemble ens;
  const double inv_k = 1.0 / static_cast<double>(sorted.size());
  double mean = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double shifted = sorted[i] + shift;
    if (!(shifted > 0.0))
      throw std::domain_error("ensemble: shifted energy must be strictly positive");
    ens.log_shifted.push_back(std::log(shifted));
    ens.weights.push_back(static_cast<double>(j - i) * inv_k);
    mean += sorted[i] * static_cast<double>(j - i);
    i = j;
  }
  ens.mean_energy = mean * inv_k;
  return ens;
}

EnergyEnsemble make_exact_ensemble(const StateVector& state,
                                   const std::vector<double>& energy_table, double shift) {
  if (energy_table.size() != state.amp.size())
    throw std::invalid_argument("ensemble: energy table size mismatch");
  EnergyEnsemble ens;
  for (std::uint64_t z = 0; z < state.amp.size(); ++z) {
    const double p = std::norm(state.amp[z]);
    if (p <= 0.0) continue;
    const double shifted = energy_table[z] + shift;
    if (!(shifted > 0.0))
      throw std::domain_error("ensemble: shifted energy must be strictly positive");
    ens.log_shifted.push_back(std::log(shifted));
    ens.weights.push_back(p);
    ens.mean_energy += p * energy_table[z];
  }
  return ens;
}

std::vector<double> FvqeStep::gradient(double tau) const {
  const double f2 = at_theta.filtered_sq_mean(tau);
  if (!(f2 > 0.0)) throw std::domain_error("fvqe gradient: <F^2> is zero");
  const double denom = 4.0 * std::sqrt(f2);
  std::vector<double> g(dim);
  for (int j = 0; j < dim; ++j)
    g[j] = -(shifted[2 * j].filtered_mean(tau) - shifted[2 * j + 1].filtered_mean(tau)) / denom;
  return g;
}

double FvqeStep::gradient_inf_norm(double tau) const {
  const auto g = gradient(tau);
  double norm = 0.0;
  for (double v : g) norm = std::max(norm, std::abs(v));
  return norm;
}

FvqeStep collect_fvqe_step(const HardwareEfficientAnsatz& ansatz, std::span<const double> theta,
                           const std::vector<double>& energy_table, double shift,
                           EstimatorMode mode, int shots, std::uint64_t seed) {
  const int dim = ansatz.param_count();
  if (static_cast<int>(theta.size()) != dim)
    throw std::invalid_argument("collect_fvqe_step: parameter length mismatch");

  auto evaluate = [&](std::span<const double> params, std::uint64_t stream) {
    const StateVector state = prepare_he_state(ansatz, params);
    if (mode == EstimatorMode::Exact) return make_exact_ensemble(state, energy_table, shift);
    std::vector<double> energies;
    energies.reserve(shots);
    for (std::uint64_t z : sample(state, shots, derive_seed(seed, stream)))
      energies.push_back(energy_table[z]);
    return make_sampled_ensemble(energies, shift);
  };

  FvqeStep step;
  step.dim = dim;
  step.shift = shift;
  step.at_theta = evaluate(theta, 0);
  step.shifted.reserve(2 * dim);
  std::vector<double> work(theta.begin(), theta.end());
  for (int j = 0; j < dim; ++j) {
    const double original = work[j];
    work[j] = original + M_PI / 2.0;
    step.shifted.push_back(evaluate(work, 2 * j + 1));
    work[j] = original - M_PI / 2.0;
    step.shifted.push_back(evaluate(work, 2 * j + 2));
    work[j] = original;
  }
  return step;
}

std::vector<double> fvqe_gradient(const HardwareEfficientAnsatz& ansatz,
                                  std::span<const double> theta, const IsingHamiltonian& h,
                                  const FilterConfig& config, EstimatorMode mode, int shots,
                                  std::uint64_t seed) {
  if (mode == EstimatorMode::Sampled && shots < 1)
    throw std::invalid_argument("fvqe_gradient: shots must be >= 1 in sampled mode");
  const FvqeStep step = collect_fvqe_step(ansatz, theta, diagonal_energies(h),
                                          config.positivity_shift, mode, shots, seed);
  if (!(config.tau > 0.0)) throw std::invalid_argument("fvqe_gradient: tau must be > 0");
  return step.gradient(config.tau);
}

std::vector<double> TauGrid::values() const {
  if (!(step > 0.0) || !(max >= step)) throw std::invalid_argument("tau grid: empty grid");
  std::vector<double> taus;
  for (int k = 1; ; ++k) {
    const double tau = step * k;
    if (tau > max * (1.0 + 1e-12)) break;
    taus.push_back(tau);
  }
  return taus;
}

double adapt_tau(const FvqeStep& step, const TauGrid& grid, double target_norm) {
  const auto taus = grid.values();
  double chosen = taus.front();
  bool any = false;
  for (double tau : taus) {
    if (step.gradient_inf_norm(tau) <= target_norm) {
      chosen = tau;  // grid is ascending, so this keeps the largest admissible
      any = true;
    }
  }
  return any ? chosen : taus.front();
}

double adapt_tau(const HardwareEfficientAnsatz& ansatz, std::span<const double> theta,
                 const IsingHamiltonian& h, const TauGrid& grid, double target_norm,
                 double shift, EstimatorMode mode, int shots, std::uint64_t seed) {
  const FvqeStep step =
      collect_fvqe_step(ansatz, theta, diagonal_energies(h), shift, mode, shots, seed);
  return adapt_tau(step, grid, target_norm);
}

}  // namespace jsvqa
