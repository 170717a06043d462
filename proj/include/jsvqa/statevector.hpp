#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "jsvqa/ising.hpp"

namespace jsvqa {

// Dense noiseless statevector. Qubit 0 is the least significant bit of the
// amplitude index, matching the QUBO variable order.
struct StateVector {
  int num_qubits = 0;
  std::vector<std::complex<double>> amp;

  static StateVector zero_state(int num_qubits);
  static StateVector uniform_state(int num_qubits);

  void apply_ry(int qubit, double theta);               // exp(-i theta Y / 2)
  void apply_cnot(int control, int target);
  void apply_x_rotation(int qubit, double beta);        // exp(-i beta X)
  void apply_diagonal_phase(const std::vector<double>& energies, double gamma);
  void apply_y_generator(int qubit);                    // -i Y / 2 (unnormalizes)

  double norm_sq() const;
  double probability(std::uint64_t z) const;
};

enum class EntanglerPattern { Brickwork, Chain };

// Hardware-efficient circuit: an initial R_y layer on every qubit, then
// `layers` repetitions of [CNOT entangler, R_y layer]. Brickwork applies the
// even-pair CNOTs (0->1, 2->3, ...) before the odd pairs (1->2, 3->4, ...);
// the chain variant applies 0->1, 1->2, ... in sequence. Control is always
// the lower qubit index.
struct HardwareEfficientAnsatz {
  int num_qubits = 0;
  int layers = 0;
  EntanglerPattern pattern = EntanglerPattern::Brickwork;

  int param_count() const { return num_qubits * (layers + 1); }

  // All angles 0 except the final layer at pi/2: prepares |+>^N exactly,
  // because the CNOT layers act trivially on |0...0>.
  std::vector<double> plus_state_params() const;
};

StateVector prepare_he_state(const HardwareEfficientAnsatz& ansatz,
                             std::span<const double> theta);

// Exact d|psi>/d theta_j, obtained by inserting the R_y generator -i Y/2 at
// parameter j's position. The result has squared norm 1/4.
StateVector derivative_state(const HardwareEfficientAnsatz& ansatz,
                             std::span<const double> theta, int j);

struct QaoaParams {
  std::vector<double> beta;
  std::vector<double> gamma;
  int layers() const { return static_cast<int>(beta.size()); }
};

// |psi(beta, gamma)> = U_M(beta_p) U(gamma_p) ... U_M(beta_1) U(gamma_1) |+>^N
// with U(gamma) the diagonal phase exp(-i gamma H) and U_M the product of
// single-qubit exp(-i beta X).
StateVector prepare_qaoa_state(const IsingHamiltonian& h, const QaoaParams& params);
StateVector prepare_qaoa_state(const IsingHamiltonian& h, const QaoaParams& params,
                               const std::vector<double>& energy_table);

// K i.i.d. Born-rule draws via inverse CDF over the cumulative distribution;
// bit-reproducible for a given seed.
std::vector<std::uint64_t> sample(const StateVector& state, int shots, std::uint64_t seed);

double exact_expectation(const StateVector& state, const IsingHamiltonian& h);
double exact_expectation(const StateVector& state, const std::vector<double>& energy_table);

// Total probability mass on the (possibly degenerate) ground set.
double ground_state_overlap(const StateVector& state,
                            const std::vector<std::uint64_t>& ground_set);

}  // namespace jsvqa
