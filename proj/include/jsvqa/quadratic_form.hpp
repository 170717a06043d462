#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace jsvqa {

// Quadratic polynomial over binary variables:
//   Q(z) = constant + sum_i linear[i] z_i + sum_{i<j} quadratic[{i,j}] z_i z_j.
// Construction folds squares (z^2 = z) into the linear part and drops
// coefficients that cancel to exactly zero, so stored terms are always
// meaningful.
struct QuadraticForm {
  double constant = 0.0;
  std::map<int, double> linear;
  std::map<std::pair<int, int>, double> quadratic;  // keys ordered i < j

  void add_constant(double v) { constant += v; }
  void add_linear(int i, double v);
  void add_quadratic(int i, int j, double v);
  void add_scaled(const QuadraticForm& other, double scale);

  double evaluate(const std::vector<std::uint8_t>& bits) const;
  double evaluate(std::uint64_t bits) const;

  // One past the largest variable index referenced; 0 for a constant form.
  int index_upper_bound() const;
  std::size_t term_count() const { return linear.size() + quadratic.size(); }
};

struct FixedVar {
  int index = 0;
  std::uint8_t value = 0;
};

// Substitutes the given variables into `form` and re-indexes the remaining
// free variables contiguously, preserving their relative order.
struct ReducedForm {
  QuadraticForm form;
  std::vector<int> free_to_full;          // free index -> original index
  std::vector<FixedVar> fixed;            // sorted by original index
  int full_size = 0;

  // Merges free-variable bits with the fixed assignments into a full bitstring.
  std::vector<std::uint8_t> complete(const std::vector<std::uint8_t>& free_bits) const;
};

ReducedForm reduce_form(const QuadraticForm& form, int num_vars,
                        const std::vector<FixedVar>& assignments);

// Exhaustive minimization/maximization over all 2^n assignments. Returns every
// minimizer (ties within 1e-9 of the exact minimum). Throws if n exceeds
// `limit` or the ground set would exceed an internal size cap.
inline constexpr int kDefaultEnumerationLimit = 26;

struct BruteForceResult {
  std::vector<std::uint64_t> ground_set;  // ascending bit codes, LSB = var 0
  double min_value = 0.0;
  double max_value = 0.0;
};

BruteForceResult brute_force_solve(const QuadraticForm& form, int num_vars,
                                   int limit = kDefaultEnumerationLimit);

}  // namespace jsvqa
