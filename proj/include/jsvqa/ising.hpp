#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "jsvqa/quadratic_form.hpp"

namespace jsvqa {

// Diagonal Hamiltonian H = h0 I + sum_n h_lin[n] Z_n + sum_{n<n'} h_quad Z_n Z_n'.
// Bit convention, fixed globally: bit value 0 <-> Z eigenvalue +1, so binary
// variables map through x = (1 - Z) / 2.
struct IsingHamiltonian {
  int num_qubits = 0;
  double h0 = 0.0;
  std::vector<double> h_lin;                      // size num_qubits
  std::map<std::pair<int, int>, double> h_quad;   // keys ordered n < n'
};

IsingHamiltonian qubo_to_ising(const QuadraticForm& form, int num_vars);

double ising_energy(const IsingHamiltonian& h, std::uint64_t bits);
double ising_energy(const IsingHamiltonian& h, const std::vector<std::uint8_t>& bits);

// All 2^N diagonal entries, indexed by bit code. Intended for N small enough
// that the table fits comfortably in memory.
std::vector<double> diagonal_energies(const IsingHamiltonian& h);

struct SpectrumExtrema {
  double min_energy = 0.0;
  double max_energy = 0.0;
  std::vector<std::uint64_t> ground_set;  // ascending bit codes
};

// Exact extrema and the full degenerate ground set by enumeration.
SpectrumExtrema spectrum_extrema(const IsingHamiltonian& h,
                                 int limit = kDefaultEnumerationLimit);

// (mean - E_min) / (E_max - E_min); throws on a degenerate spectrum.
double scaled_energy(double mean_energy, const SpectrumExtrema& extrema);
// mean / E_max, the alternative normalization used by some summaries.
double scaled_energy_max_only(double mean_energy, const SpectrumExtrema& extrema);

// Text dump, one term per line: "h0 <v>", "Z <n> <v>", "ZZ <n> <n'> <v>".
// Values are printed with enough digits for an exact round trip.
std::string dump_ising(const IsingHamiltonian& h);
IsingHamiltonian parse_ising(const std::string& text);

}  // namespace jsvqa
