#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "jsvqa/quadratic_form.hpp"

namespace jsvqa {

// Job shop instance: J jobs pass machines 1..M in order, one job per time
// slot, with early/late delivery costs against per-job due times and a
// changeover cost whenever consecutive slots of a machine carry jobs from
// different production groups. Machine m may idle for e_m slots at the start
// or end of its schedule, so its horizon is T_m = J + e_m.
struct JspInstance {
  int num_jobs = 0;
  int num_machines = 0;
  std::vector<int> idle_budget;                          // e[m-1] >= 0
  std::vector<int> due_time;                             // d[j-1], 1-based slots
  std::vector<std::vector<std::string>> production_group;  // [m-1][j-1], opaque labels
  double cost_early = 0.0;
  double cost_late = 0.0;
  double cost_switch = 0.0;
  double penalty_weight = 1.0;

  int horizon(int machine) const;  // T_m, machine 1-based
  void validate() const;           // throws std::invalid_argument
};

// Upper bound on any feasible schedule cost, plus one. With this weight a
// single constraint violation always outweighs any achievable cost, so QUBO
// minimizers decode to feasible schedules.
double default_penalty_weight(const JspInstance& inst);

struct VarDesc {
  enum class Kind { Real, Dummy };
  Kind kind = Kind::Real;
  int machine = 0;  // 1-based
  int job = 0;      // 1-based; 0 for Dummy
  int slot = 0;     // 1-based

  friend bool operator==(const VarDesc&, const VarDesc&) = default;
  std::string str() const;
};

// Canonical variable ordering: all x_{mjt} sorted by (m, j, t), then all
// dummy-head variables y_{mt} sorted by (m, t) with t in 1..e_m. Machines
// with e_m <= 1 can have their dummies elided (opt-in), in which case the
// head/tail slot constraints they would appear in are implied and omitted.
class VariableMap {
 public:
  static VariableMap build(const JspInstance& inst, bool elide_small_dummies = false);
  static VariableMap from_descriptors(std::vector<VarDesc> vars);

  int size() const { return static_cast<int>(vars_.size()); }
  const VarDesc& at(int i) const;
  const std::vector<VarDesc>& descriptors() const { return vars_; }

  int index_of(const VarDesc& v) const;  // throws if absent
  int real_index(int machine, int job, int slot) const;
  int dummy_index(int machine, int slot) const;
  bool contains(const VarDesc& v) const;

 private:
  std::vector<VarDesc> vars_;
  std::map<std::tuple<int, int, int, int>, int> index_;
};

// Appendix-style cost and penalty builders. Each returns its own
// QuadraticForm over the indices of `map`; assemble_qubo sums them.
QuadraticForm build_delivery_cost(const JspInstance& inst, const VariableMap& map);
QuadraticForm build_production_cost(const JspInstance& inst, const VariableMap& map);
QuadraticForm build_job_assignment_penalty(const JspInstance& inst, const VariableMap& map);
QuadraticForm build_time_assignment_penalty(const JspInstance& inst, const VariableMap& map);
QuadraticForm build_process_order_penalty(const JspInstance& inst, const VariableMap& map);
QuadraticForm build_idle_slot_penalty(const JspInstance& inst, const VariableMap& map);

struct Qubo {
  QuadraticForm form;
  VariableMap map;
};

Qubo assemble_qubo(const JspInstance& inst, bool elide_small_dummies = false);

struct VariableCounts {
  long long real_vars = 0;   // N_x
  long long dummy_vars = 0;  // N_y
  long long total = 0;       // N
};

VariableCounts count_variables(int num_jobs, int num_machines, const std::vector<int>& idle_budget);

// Worst-case variable count for J jobs and M machines (e_m = (m-1)(J-1)).
VariableCounts worst_case_variables(int num_jobs, int num_machines);

enum class ConstraintFamily { JobAssignment, TimeAssignment, ProcessOrder, IdleSlot };
const char* constraint_family_name(ConstraintFamily f);

// Direct evaluation of the schedule cost from the cost definitions, without
// going through the QUBO expansion. Serves as the independent oracle for
// assemble_qubo: on feasible bitstrings both agree exactly. Infeasible
// schedules report the first violated family in the fixed order
// (job, time, order, idle); no penalty weights are ever applied.
struct ScheduleCost {
  bool feasible = false;
  double cost = 0.0;                                        // valid when feasible
  ConstraintFamily violated = ConstraintFamily::JobAssignment;  // valid when infeasible
};

ScheduleCost evaluate_schedule_cost(const JspInstance& inst, const VariableMap& map,
                                    const std::vector<std::uint8_t>& bits);

// fix_variables on a JSP QUBO: reduces the form and narrows the VariableMap
// to the free descriptors (original order, re-indexed contiguously).
struct FixedQubo {
  QuadraticForm form;
  VariableMap map;       // free variables only
  ReducedForm reduction;  // index bookkeeping incl. fixed values
};

FixedQubo fix_variables(const QuadraticForm& form, const VariableMap& map,
                        const std::vector<FixedVar>& assignments);

}  // namespace jsvqa
