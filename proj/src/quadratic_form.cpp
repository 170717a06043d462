#include "jsvqa/quadratic_form.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace jsvqa {

namespace {

template <typename Map, typename Key>
void accumulate(Map& map, const Key& key, double v) {
  if (v == 0.0) return;
  auto [it, inserted] = map.emplace(key, v);
  if (!inserted) {
    it->second += v;
    if (it->second == 0.0) map.erase(it);
  }
}

}  // namespace

void QuadraticForm::add_linear(int i, double v) {
  if (i < 0) throw std::out_of_range("QuadraticForm: negative variable index");
  accumulate(linear, i, v);
}

void QuadraticForm::add_quadratic(int i, int j, double v) {
  if (i < 0 || j < 0) throw std::out_of_range("QuadraticForm: negative variable index");
  if (i == j) {
    add_linear(i, v);  // z^2 = z
    return;
  }
  accumulate(quadratic, std::minmax(i, j), v);
}

void QuadraticForm::add_scaled(const QuadraticForm& other, double scale) {
  constant += scale * other.constant;
  for (const auto& [i, v] : other.linear) add_linear(i, scale * v);
  for (const auto& [ij, v] : other.quadratic) add_quadratic(ij.first, ij.second, scale * v);
}

double QuadraticForm::evaluate(const std::vector<std::uint8_t>& bits) const {
  double value = constant;
  for (const auto& [i, v] : linear) {
    if (i >= static_cast<int>(bits.size()))
      throw std::out_of_range("QuadraticForm::evaluate: bitstring too short");
    if (bits[i]) value += v;
  }
  for (const auto& [ij, v] : quadratic) {
    if (ij.second >= static_cast<int>(bits.size()))
      throw std::out_of_range("QuadraticForm::evaluate: bitstring too short");
    if (bits[ij.first] && bits[ij.second]) value += v;
  }
  return value;
}

double QuadraticForm::evaluate(std::uint64_t bits) const {
  double value = constant;
  for (const auto& [i, v] : linear)
    if (bits >> i & 1) value += v;
  for (const auto& [ij, v] : quadratic)
    if ((bits >> ij.first & 1) && (bits >> ij.second & 1)) value += v;
  return value;
}

int QuadraticForm::index_upper_bound() const {
  int n = 0;
  if (!linear.empty()) n = std::max(n, linear.rbegin()->first + 1);
  for (const auto& [ij, v] : quadratic) {
    (void)v;
    n = std::max(n, ij.second + 1);
  }
  return n;
}

std::vector<std::uint8_t> ReducedForm::complete(const std::vector<std::uint8_t>& free_bits) const {
  if (free_bits.size() != free_to_full.size())
    throw std::invalid_argument("ReducedForm::complete: wrong number of free bits");
  std::vector<std::uint8_t> full(full_size, 0);
  for (std::size_t k = 0; k < free_bits.size(); ++k) full[free_to_full[k]] = free_bits[k];
  for (const auto& fv : fixed) full[fv.index] = fv.value;
  return full;
}

ReducedForm reduce_form(const QuadraticForm& form, int num_vars,
                        const std::vector<FixedVar>& assignments) {
  if (num_vars < form.index_upper_bound())
    throw std::invalid_argument("reduce_form: num_vars smaller than referenced indices");

  std::vector<int> value_of(num_vars, -1);  // -1 = free
  for (const auto& fv : assignments) {
    if (fv.index < 0 || fv.index >= num_vars)
      throw std::out_of_range("reduce_form: assignment index " + std::to_string(fv.index) +
                              " out of range");
    if (fv.value > 1) throw std::invalid_argument("reduce_form: assignment value must be 0 or 1");
    if (value_of[fv.index] >= 0 && value_of[fv.index] != fv.value)
      throw std::invalid_argument("reduce_form: conflicting duplicate assignment for variable " +
                                  std::to_string(fv.index));
    value_of[fv.index] = fv.value;
  }

  ReducedForm out;
  out.full_size = num_vars;
  std::vector<int> full_to_free(num_vars, -1);
  for (int i = 0; i < num_vars; ++i) {
    if (value_of[i] < 0) {
      full_to_free[i] = static_cast<int>(out.free_to_full.size());
      out.free_to_full.push_back(i);
    } else {
      out.fixed.push_back({i, static_cast<std::uint8_t>(value_of[i])});
    }
  }

  out.form.constant = form.constant;
  for (const auto& [i, v] : form.linear) {
    if (value_of[i] < 0)
      out.form.add_linear(full_to_free[i], v);
    else if (value_of[i] == 1)
      out.form.add_constant(v);
  }
  for (const auto& [ij, v] : form.quadratic) {
    const int a = ij.first, b = ij.second;
    const int va = value_of[a], vb = value_of[b];
    if (va < 0 && vb < 0)
      out.form.add_quadratic(full_to_free[a], full_to_free[b], v);
    else if (va < 0)
      { if (vb == 1) out.form.add_linear(full_to_free[a], v); }
    else if (vb < 0)
      { if (va == 1) out.form.add_linear(full_to_free[b], v); }
    else if (va == 1 && vb == 1)
      out.form.add_constant(v);
  }
  return out;
}

namespace {

// Flattened view for incremental (Gray code) evaluation.
struct CompiledQuadratic {
  int n = 0;
  double constant = 0.0;
  std::vector<double> linear;
  std::vector<std::vector<std::pair<int, double>>> adjacency;

  explicit CompiledQuadratic(const QuadraticForm& form, int num_vars)
      : n(num_vars), constant(form.constant), linear(num_vars, 0.0), adjacency(num_vars) {
    for (const auto& [i, v] : form.linear) linear[i] = v;
    for (const auto& [ij, v] : form.quadratic) {
      adjacency[ij.first].emplace_back(ij.second, v);
      adjacency[ij.second].emplace_back(ij.first, v);
    }
  }

  // Energy change of flipping bit `i` given the current assignment.
  double flip_delta(int i, std::uint64_t bits) const {
    double d = linear[i];
    for (const auto& [j, v] : adjacency[i])
      if (bits >> j & 1) d += v;
    return (bits >> i & 1) ? -d : d;
  }
};

constexpr std::size_t kGroundSetCap = std::size_t{1} << 22;

}  // namespace

BruteForceResult brute_force_solve(const QuadraticForm& form, int num_vars, int limit) {
  if (num_vars < form.index_upper_bound())
    throw std::invalid_argument("brute_force_solve: num_vars smaller than referenced indices");
  if (num_vars > limit)
    throw std::invalid_argument("brute_force_solve: " + std::to_string(num_vars) +
                                " variables exceeds enumeration limit " + std::to_string(limit));

  const CompiledQuadratic compiled(form, num_vars);
  const std::uint64_t count = std::uint64_t{1} << num_vars;

  // Pass 1: locate extrema with incremental Gray-code updates, then re-derive
  // the exact values by direct evaluation of the arg-extrema.
  std::uint64_t bits = 0, argmin = 0, argmax = 0;
  double energy = compiled.constant, lo = energy, hi = energy;
  for (std::uint64_t g = 1; g < count; ++g) {
    const int flip = __builtin_ctzll(g);
    energy += compiled.flip_delta(flip, bits);
    bits ^= std::uint64_t{1} << flip;
    if (energy < lo) { lo = energy; argmin = bits; }
    if (energy > hi) { hi = energy; argmax = bits; }
  }
  const double min_value = form.evaluate(argmin);
  const double max_value = form.evaluate(argmax);

  // Pass 2: collect ties. Candidates are screened with a loose incremental
  // bound, then confirmed against a direct evaluation at 1e-9 absolute.
  const double screen = min_value + 1e-6;
  const double tie_tol = 1e-9;
  BruteForceResult out{{}, min_value, max_value};
  bits = 0;
  energy = compiled.constant;
  auto consider = [&](std::uint64_t z, double e_inc) {
    if (e_inc > screen) return;
    if (std::abs(form.evaluate(z) - min_value) > tie_tol) return;
    if (out.ground_set.size() >= kGroundSetCap)
      throw std::runtime_error("brute_force_solve: degenerate ground set exceeds cap");
    out.ground_set.push_back(z);
  };
  consider(0, energy);
  for (std::uint64_t g = 1; g < count; ++g) {
    const int flip = __builtin_ctzll(g);
    energy += compiled.flip_delta(flip, bits);
    bits ^= std::uint64_t{1} << flip;
    consider(bits, energy);
  }
  std::sort(out.ground_set.begin(), out.ground_set.end());
  return out;
}

}  // namespace jsvqa
