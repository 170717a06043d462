#include "jsvqa/ising.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace jsvqa {

namespace {

void accumulate_pair(std::map<std::pair<int, int>, double>& m, int a, int b, double v) {
  if (v == 0.0) return;
  auto [it, inserted] = m.emplace(std::minmax(a, b), v);
  if (!inserted) {
    it->second += v;
    if (it->second == 0.0) m.erase(it);
  }
}

}  // namespace

IsingHamiltonian qubo_to_ising(const QuadraticForm& form, int num_vars) {
  if (num_vars < form.index_upper_bound())
    throw std::invalid_argument("qubo_to_ising: num_vars smaller than referenced indices");
  IsingHamiltonian h;
  h.num_qubits = num_vars;
  h.h_lin.assign(num_vars, 0.0);
  h.h0 = form.constant;
  // x_i = (1 - Z_i) / 2
  for (const auto& [i, v] : form.linear) {
    h.h0 += v / 2.0;
    h.h_lin[i] -= v / 2.0;
  }
  // x_i x_j = (1 - Z_i - Z_j + Z_i Z_j) / 4
  for (const auto& [ij, v] : form.quadratic) {
    h.h0 += v / 4.0;
    h.h_lin[ij.first] -= v / 4.0;
    h.h_lin[ij.second] -= v / 4.0;
    accumulate_pair(h.h_quad, ij.first, ij.second, v / 4.0);
  }
  return h;
}

double ising_energy(const IsingHamiltonian& h, std::uint64_t bits) {
  double e = h.h0;
  for (int n = 0; n < h.num_qubits; ++n) e += (bits >> n & 1) ? -h.h_lin[n] : h.h_lin[n];
  for (const auto& [nn, v] : h.h_quad) {
    const bool flip = ((bits >> nn.first) ^ (bits >> nn.second)) & 1;
    e += flip ? -v : v;
  }
  return e;
}

double ising_energy(const IsingHamiltonian& h, const std::vector<std::uint8_t>& bits) {
  if (static_cast<int>(bits.size()) != h.num_qubits)
    throw std::invalid_argument("ising_energy: bitstring length mismatch");
  std::uint64_t code = 0;
  for (int n = 0; n < h.num_qubits; ++n)
    if (bits[n]) code |= std::uint64_t{1} << n;
  return ising_energy(h, code);
}

std::vector<double> diagonal_energies(const IsingHamiltonian& h) {
  if (h.num_qubits > kDefaultEnumerationLimit)
    throw std::invalid_argument("diagonal_energies: too many qubits for a dense table");
  const std::uint64_t count = std::uint64_t{1} << h.num_qubits;
  std::vector<double> table(count);
  for (std::uint64_t z = 0; z < count; ++z) table[z] = ising_energy(h, z);
  return table;
}

SpectrumExtrema spectrum_extrema(const IsingHamiltonian& h, int limit) {
  if (h.num_qubits > limit)
    throw std::invalid_argument("spectrum_extrema: " + std::to_string(h.num_qubits) +
                                " qubits exceeds enumeration limit " + std::to_string(limit));

  // Incremental spin-flip enumeration in Gray-code order. Flipping qubit n
  // changes the energy by -2 s_n (h_n + sum_m h_nm s_m).
  std::vector<std::vector<std::pair<int, double>>> adjacency(h.num_qubits);
  for (const auto& [nn, v] : h.h_quad) {
    adjacency[nn.first].emplace_back(nn.second, v);
    adjacency[nn.second].emplace_back(nn.first, v);
  }
  auto spin = [](std::uint64_t bits, int n) { return (bits >> n & 1) ? -1.0 : 1.0; };
  auto flip_delta = [&](std::uint64_t bits, int n) {
    double local = h.h_lin[n];
    for (const auto& [m, v] : adjacency[n]) local += v * spin(bits, m);
    return -2.0 * spin(bits, n) * local;
  };

  const std::uint64_t count = std::uint64_t{1} << h.num_qubits;
  std::uint64_t bits = 0, argmin = 0, argmax = 0;
  double energy = ising_energy(h, std::uint64_t{0});
  double lo = energy, hi = energy;
  for (std::uint64_t g = 1; g < count; ++g) {
    const int n = __builtin_ctzll(g);
    energy += flip_delta(bits, n);
    bits ^= std::uint64_t{1} << n;
    if (energy < lo) { lo = energy; argmin = bits; }
    if (energy > hi) { hi = energy; argmax = bits; }
  }

  SpectrumExtrema out;
  out.min_energy = ising_energy(h, argmin);
  out.max_energy = ising_energy(h, argmax);

  const double screen = out.min_energy + 1e-6;
  const double tie_tol = 1e-9;
  constexpr std::size_t cap = std::size_t{1} << 22;
  bits = 0;
  energy = ising_energy(h, std::uint64_t{0});
  auto consider = [&](std::uint64_t z, double e_inc) {
    if (e_inc > screen) return;
    if (std::abs(ising_energy(h, z) - out.min_energy) > tie_tol) return;
    if (out.ground_set.size() >= cap)
      throw std::runtime_error("spectrum_extrema: degenerate ground set exceeds cap");
    out.ground_set.push_back(z);
  };
  consider(0, energy);
  for (std::uint64_t g = 1; g < count; ++g) {
    const int n = __builtin_ctzll(g);
    energy += flip_delta(bits, n);
    bits ^= std::uint64_t{1} << n;
    consider(bits, energy);
  }
  std::sort(out.ground_set.begin(), out.ground_set.end());
  return out;
}

double scaled_energy(double mean_energy, const SpectrumExtrema& extrema) {
  if (!(extrema.min_energy < extrema.max_energy))
    throw std::domain_error("scaled_energy: degenerate spectrum (E_min == E_max)");
  return (mean_energy - extrema.min_energy) / (extrema.max_energy - extrema.min_energy);
}

double scaled_energy_max_only(double mean_energy, const SpectrumExtrema& extrema) {
  if (extrema.max_energy == 0.0)
    throw std::domain_error("scaled_energy_max_only: E_max is zero");
  return mean_energy / extrema.max_energy;
}

namespace {
std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

std::string dump_ising(const IsingHamiltonian& h) {
  std::ostringstream out;
  out << "qubits " << h.num_qubits << "\n";
  out << "h0 " << format_value(h.h0) << "\n";
  for (int n = 0; n < h.num_qubits; ++n)
    if (h.h_lin[n] != 0.0) out << "Z " << n << " " << format_value(h.h_lin[n]) << "\n";
  for (const auto& [nn, v] : h.h_quad)
    out << "ZZ " << nn.first << " " << nn.second << " " << format_value(v) << "\n";
  return out.str();
}

IsingHamiltonian parse_ising(const std::string& text) {
  IsingHamiltonian h;
  std::istringstream in(text);
  std::string line;
  bool saw_qubits = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    auto fail = [&](const std::string& why) {
      throw std::invalid_argument("parse_ising: line " + std::to_string(line_no) + ": " + why);
    };
    if (tag == "qubits") {
      if (!(ls >> h.num_qubits) || h.num_qubits < 0) fail("bad qubit count");
      h.h_lin.assign(h.num_qubits, 0.0);
      saw_qubits = true;
    } else if (tag == "h0") {
      if (!(ls >> h.h0)) fail("bad h0 value");
    } else if (tag == "Z") {
      int n; double v;
      if (!saw_qubits) fail("Z term before qubit count");
      if (!(ls >> n >> v) || n < 0 || n >= h.num_qubits) fail("bad Z term");
      h.h_lin[n] += v;
    } else if (tag == "ZZ") {
      int n, m; double v;
      if (!saw_qubits) fail("ZZ term before qubit count");
      if (!(ls >> n >> m >> v) || n < 0 || m < 0 || n >= h.num_qubits || m >= h.num_qubits ||
          n == m)
        fail("bad ZZ term");
      accumulate_pair(h.h_quad, n, m, v);
    } else {
      fail("unknown tag '" + tag + "'");
    }
  }
  if (!saw_qubits) throw std::invalid_argument("parse_ising: missing qubit count");
  return h;
}

}  // namespace jsvqa
