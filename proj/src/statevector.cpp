#include "jsvqa/statevector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "jsvqa/rng.hpp"

namespace jsvqa {

namespace {

void check_qubit(const StateVector& s, int qubit) {
  if (qubit < 0 || qubit >= s.num_qubits)
    throw std::out_of_range("statevector: qubit index out of range");
}

}  // namespace

StateVector StateVector::zero_state(int num_qubits) {
  if (num_qubits < 0 || num_qubits > kDefaultEnumerationLimit)
    throw std::invalid_argument("statevector: unsupported qubit count");
  StateVector s;
  s.num_qubits = num_qubits;
  s.amp.assign(std::uint64_t{1} << num_qubits, {0.0, 0.0});
  s.amp[0] = 1.0;
  return s;
}

StateVector StateVector::uniform_state(int num_qubits) {
  StateVector s = zero_state(num_qubits);
  const double a = 1.0 / std::sqrt(static_cast<double>(s.amp.size()));
  std::fill(s.amp.begin(), s.amp.end(), std::complex<double>{a, 0.0});
  return s;
}

void StateVector::apply_ry(int qubit, double theta) {
  check_qubit(*this, qubit);
  const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  const std::uint64_t bit = std::uint64_t{1} << qubit;
  for (std::uint64_t i = 0; i < amp.size(); ++i) {
    if (i & bit) continue;
    const auto a0 = amp[i], a1 = amp[i | bit];
    amp[i] = c * a0 - s * a1;
    amp[i | bit] = s * a0 + c * a1;
  }
}

void StateVector::apply_cnot(int control, int target) {
  check_qubit(*this, control);
  check_qubit(*this, target);
  if (control == target) throw std::invalid_argument("apply_cnot: control equals target");
  const std::uint64_t cbit = std::uint64_t{1} << control;
  const std::uint64_t tbit = std::uint64_t{1} << target;
  for (std::uint64_t i = 0; i < amp.size(); ++i)
    if ((i & cbit) && !(i & tbit)) std::swap(amp[i], amp[i | tbit]);
}

void StateVector::apply_x_rotation(int qubit, double beta) {
  check_qubit(*this, qubit);
  const double c = std::cos(beta);
  const std::complex<double> ms{0.0, -std::sin(beta)};
  const std::uint64_t bit = std::uint64_t{1} << qubit;
  for (std::uint64_t i = 0; i < amp.size(); ++i) {
    if (i & bit) continue;
    const auto a0 = amp[i], a1 = amp[i | bit];
    amp[i] = c * a0 + ms * a1;
    amp[i | bit] = ms * a0 + c * a1;
  }
}

void StateVector::apply_diagonal_phase(const std::vector<double>& energies, double gamma) {
  if (energies.size() != amp.size())
    throw std::invalid_argument("apply_diagonal_phase: energy table size mismatch");
  for (std::uint64_t z = 0; z < amp.size(); ++z)
    amp[z] *= std::polar(1.0, -gamma * energies[z]);
}

void StateVector::apply_y_generator(int qubit) {
  check_qubit(*this, qubit);
  // -i Y / 2 maps |0> -> |1>/2 and |1> -> -|0>/2.
  const std::uint64_t bit = std::uint64_t{1} << qubit;
  for (std::uint64_t i = 0; i < amp.size(); ++i) {
    if (i & bit) continue;
    const auto a0 = amp[i], a1 = amp[i | bit];
    amp[i] = -0.5 * a1;
    amp[i | bit] = 0.5 * a0;
  }
}

double StateVector::norm_sq() const {
  double total = 0.0;
  for (const auto& a : amp) total += std::norm(a);
  return total;
}

double StateVector::probability(std::uint64_t z) const {
  if (z >= amp.size()) throw std::out_of_range("probability: basis index out of range");
  return std::norm(amp[z]);
}

std::vector<double> HardwareEfficientAnsatz::plus_state_params() const {
  std::vector<double> theta(param_count(), 0.0);
  for (int q = 0; q < num_qubits; ++q) theta[layers * num_qubits + q] = M_PI / 2.0;
  return theta;
}

namespace {

void apply_entangler(StateVector& s, EntanglerPattern pattern) {
  const int n = s.num_qubits;
  if (pattern == EntanglerPattern::Brickwork) {
    for (int q = 0; q + 1 < n; q += 2) s.apply_cnot(q, q + 1);
    for (int q = 1; q + 1 < n; q += 2) s.apply_cnot(q, q + 1);
  } else {
    for (int q = 0; q + 1 < n; ++q) s.apply_cnot(q, q + 1);
  }
}

StateVector run_he_circuit(const HardwareEfficientAnsatz& ansatz, std::span<const double> theta,
                           int generator_param) {
  if (ansatz.num_qubits < 1) throw std::invalid_argument("ansatz: need at least one qubit");
  if (ansatz.layers < 0) throw std::invalid_argument("ansatz: negative layer count");
  if (static_cast<int>(theta.size()) != ansatz.param_count())
    throw std::invalid_argument("ansatz: expected " + std::to_string(ansatz.param_count()) +
                                " parameters, got " + std::to_string(theta.size()));
  if (generator_param >= ansatz.param_count())
    throw std::out_of_range("derivative_state: parameter index out of range");

  StateVector s = StateVector::zero_state(ansatz.num_qubits);
  const int n = ansatz.num_qubits;
  for (int layer = 0; layer <= ansatz.layers; ++layer) {
    if (layer > 0) apply_entangler(s, ansatz.pattern);
    for (int q = 0; q < n; ++q) s.apply_ry(q, theta[layer * n + q]);
    // Y_q commutes with every R_y in this layer, so inserting the generator
    // after the layer equals inserting it right after gate (layer, q).
    if (generator_param >= 0 && generator_param / n == layer)
      s.apply_y_generator(generator_param % n);
  }
  return s;
}

}  // namespace

StateVector prepare_he_state(const HardwareEfficientAnsatz& ansatz,
                             std::span<const double> theta) {
  return run_he_circuit(ansatz, theta, -1);
}

StateVector derivative_state(const HardwareEfficientAnsatz& ansatz,
                             std::span<const double> theta, int j) {
  if (j < 0) throw std::out_of_range("derivative_state: parameter index out of range");
  return run_he_circuit(ansatz, theta, j);
}

StateVector prepare_qaoa_state(const IsingHamiltonian& h, const QaoaParams& params) {
  return prepare_qaoa_state(h, params, diagonal_energies(h));
}

StateVector prepare_qaoa_state(const IsingHamiltonian& h, const QaoaParams& params,
                               const std::vector<double>& energy_table) {
  if (params.beta.size() != params.gamma.size())
    throw std::invalid_argument("qaoa: beta and gamma must have equal length");
  StateVector s = StateVector::uniform_state(h.num_qubits);
  for (int k = 0; k < params.layers(); ++k) {
    s.apply_diagonal_phase(energy_table, params.gamma[k]);
    for (int q = 0; q < h.num_qubits; ++q) s.apply_x_rotation(q, params.beta[k]);
  }
  return s;
}

std::vector<std::uint64_t> sample(const StateVector& state, int shots, std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("sample: shot count must be >= 1");
  std::vector<double> cumulative(state.amp.size());
  double total = 0.0;
  std::uint64_t last_support = 0;
  for (std::uint64_t z = 0; z < state.amp.size(); ++z) {
    const double p = std::norm(state.amp[z]);
    if (p > 0.0) last_support = z;
    total += p;
    cumulative[z] = total;
  }
  SplitMix64 rng(seed);
  std::vector<std::uint64_t> draws(shots);
  for (int k = 0; k < shots; ++k) {
    const double u = rng.next_double() * total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    std::uint64_t z = it == cumulative.end() ? last_support
                                             : static_cast<std::uint64_t>(it - cumulative.begin());
    draws[k] = std::min(z, last_support);
  }
  return draws;
}

double exact_expectation(const StateVector& state, const IsingHamiltonian& h) {
  if (h.num_qubits != state.num_qubits)
    throw std::invalid_argument("exact_expectation: qubit count mismatch");
  double mean = 0.0;
  for (std::uint64_t z = 0; z < state.amp.size(); ++z) {
    const double p = std::norm(state.amp[z]);
    if (p > 0.0) mean += p * ising_energy(h, z);
  }
  return mean;
}

double exact_expectation(const StateVector& state, const std::vector<double>& energy_table) {
  if (energy_table.size() != state.amp.size())
    throw std::invalid_argument("exact_expectation: energy table size mismatch");
  double mean = 0.0;
  for (std::uint64_t z = 0; z < state.amp.size(); ++z)
    mean += std::norm(state.amp[z]) * energy_table[z];
  return mean;
}

double ground_state_overlap(const StateVector& state,
                            const std::vector<std::uint64_t>& ground_set) {
  if (ground_set.empty())
    throw std::invalid_argument("ground_state_overlap: empty ground set");
  double mass = 0.0;
  for (std::uint64_t z : ground_set) mass += state.probability(z);
  return mass;
}

}  // namespace jsvqa
