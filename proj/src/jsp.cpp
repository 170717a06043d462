#include "jsvqa/jsp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jsvqa {

int JspInstance::horizon(int machine) const {
  if (machine < 1 || machine > num_machines)
    throw std::out_of_range("horizon: machine index " + std::to_string(machine) +
                            " out of range 1.." + std::to_string(num_machines));
  return num_jobs + idle_budget[machine - 1];
}

void JspInstance::validate() const {
  if (num_jobs < 1) throw std::invalid_argument("instance: num_jobs must be >= 1");
  if (num_machines < 1) throw std::invalid_argument("instance: num_machines must be >= 1");
  if (static_cast<int>(idle_budget.size()) != num_machines)
    throw std::invalid_argument("instance: idle_budget must have one entry per machine");
  for (int e : idle_budget)
    if (e < 0) throw std::invalid_argument("instance: idle budgets must be non-negative");
  if (static_cast<int>(due_time.size()) != num_jobs)
    throw std::invalid_argument("instance: due_time must have one entry per job");
  const int last_horizon = num_jobs + idle_budget[num_machines - 1];
  for (int d : due_time)
    if (d < 1 || d > last_horizon)
      throw std::invalid_argument("instance: due times must lie in 1..T_M = " +
                                  std::to_string(last_horizon));
  if (static_cast<int>(production_group.size()) != num_machines)
    throw std::invalid_argument("instance: production_group must have one row per machine");
  for (const auto& row : production_group)
    if (static_cast<int>(row.size()) != num_jobs)
      throw std::invalid_argument("instance: production_group rows must have one entry per job");
  if (cost_early < 0 || cost_late < 0 || cost_switch < 0)
    throw std::invalid_argument("instance: cost constants must be non-negative");
  if (!(penalty_weight > 0)) throw std::invalid_argument("instance: penalty_weight must be > 0");
}

double default_penalty_weight(const JspInstance& inst) {
  const int t_last = inst.num_jobs + inst.idle_budget[inst.num_machines - 1];
  double bound = 1.0;
  for (int d : inst.due_time)
    bound += std::max(inst.cost_early * d, inst.cost_late * (t_last - d));
  for (int m = 1; m <= inst.num_machines; ++m)
    bound += inst.cost_switch * (inst.num_jobs + inst.idle_budget[m - 1] - 1);
  return bound;
}

std::string VarDesc::str() const {
  if (kind == Kind::Real)
    return "x(m=" + std::to_string(machine) + ",j=" + std::to_string(job) +
           ",t=" + std::to_string(slot) + ")";
  return "y(m=" + std::to_string(machine) + ",t=" + std::to_string(slot) + ")";
}

namespace {
std::tuple<int, int, int, int> key_of(const VarDesc& v) {
  return {v.kind == VarDesc::Kind::Real ? 0 : 1, v.machine, v.job, v.slot};
}
}  // namespace

VariableMap VariableMap::build(const JspInstance& inst, bool elide_small_dummies) {
  inst.validate();
  std::vector<VarDesc> vars;
  for (int m = 1; m <= inst.num_machines; ++m) {
    const int horizon = inst.horizon(m);
    for (int j = 1; j <= inst.num_jobs; ++j)
      for (int t = 1; t <= horizon; ++t)
        vars.push_back({VarDesc::Kind::Real, m, j, t});
  }
  for (int m = 1; m <= inst.num_machines; ++m) {
    const int budget = inst.idle_budget[m - 1];
    if (elide_small_dummies && budget <= 1) continue;
    for (int t = 1; t <= budget; ++t) vars.push_back({VarDesc::Kind::Dummy, m, 0, t});
  }
  return from_descriptors(std::move(vars));
}

VariableMap VariableMap::from_descriptors(std::vector<VarDesc> vars) {
  VariableMap map;
  map.vars_ = std::move(vars);
  for (int i = 0; i < static_cast<int>(map.vars_.size()); ++i) {
    auto [it, inserted] = map.index_.emplace(key_of(map.vars_[i]), i);
    (void)it;
    if (!inserted)
      throw std::invalid_argument("VariableMap: duplicate descriptor " + map.vars_[i].str());
  }
  return map;
}

const VarDesc& VariableMap::at(int i) const {
  if (i < 0 || i >= size()) throw std::out_of_range("VariableMap: index out of range");
  return vars_[i];
}

int VariableMap::index_of(const VarDesc& v) const {
  auto it = index_.find(key_of(v));
  if (it == index_.end())
    throw std::out_of_range("VariableMap: no variable " + v.str());
  return it->second;
}

int VariableMap::real_index(int machine, int job, int slot) const {
  return index_of({VarDesc::Kind::Real, machine, job, slot});
}

int VariableMap::dummy_index(int machine, int slot) const {
  return index_of({VarDesc::Kind::Dummy, machine, 0, slot});
}

bool VariableMap::contains(const VarDesc& v) const { return index_.count(key_of(v)) > 0; }

QuadraticForm build_delivery_cost(const JspInstance& inst, const VariableMap& map) {
  QuadraticForm form;
  const int m_last = inst.num_machines;
  const int horizon = inst.horizon(m_last);
  for (int j = 1; j <= inst.num_jobs; ++j) {
    const int due = inst.due_time[j - 1];
    for (int t = 1; t <= horizon; ++t) {
      const double coeff = t <= due ? inst.cost_early * (due - t) : inst.cost_late * (t - due);
      form.add_linear(map.real_index(m_last, j, t), coeff);
    }
  }
  return form;
}

QuadraticForm build_production_cost(const JspInstance& inst, const VariableMap& map) {
  QuadraticForm form;
  for (int m = 1; m <= inst.num_machines; ++m) {
    const auto& groups = inst.production_group[m - 1];
    const int horizon = inst.horizon(m);
    for (int j1 = 1; j1 <= inst.num_jobs; ++j1)
      for (int j2 = 1; j2 <= inst.num_jobs; ++j2) {
        if (groups[j1 - 1] == groups[j2 - 1]) continue;  // G^{(m)} entry 0
        for (int t = 1; t + 1 <= horizon; ++t)
          form.add_quadratic(map.real_index(m, j1, t), map.real_index(m, j2, t + 1),
                             inst.cost_switch);
      }
  }
  return form;
}

namespace {

// Expands p * (sum_i v_i * sign_i - target)^2 over binary variables, folding
// squares into linear terms.
void add_squared_penalty(QuadraticForm& form, const std::vector<std::pair<int, double>>& terms,
                         double target, double p) {
  form.add_constant(p * target * target);
  for (std::size_t a = 0; a < terms.size(); ++a) {
    const auto& [ia, ca] = terms[a];
    form.add_linear(ia, p * (ca * ca - 2.0 * target * ca));
    for (std::size_t b = a + 1; b < terms.size(); ++b)
      form.add_quadratic(ia, terms[b].first, p * 2.0 * ca * terms[b].second);
  }
}

}  // namespace

QuadraticForm build_job_assignment_penalty(const JspInstance& inst, const VariableMap& map) {
  QuadraticForm form;
  const double p = inst.penalty_weight;
  for (int m = 1; m <= inst.num_machines; ++m) {
    const int horizon = inst.horizon(m);
    for (int j = 1; j <= inst.num_jobs; ++j) {
      std::vector<std::pair<int, double>> terms;
      terms.reserve(horizon);
      for (int t = 1; t <= horizon; ++t) terms.emplace_back(map.real_index(m, j, t), 1.0);
      add_squared_penalty(form, terms, 1.0, p);
    }
  }
  return form;
}

QuadraticForm build_time_assignment_penalty(const JspInstance& inst, const VariableMap& map) {
  QuadraticForm form;
  const double p = inst.penalty_weight;
  const int jobs = inst.num_jobs;
  for (int m = 1; m <= inst.num_machines; ++m) {
    const int budget = inst.idle_budget[m - 1];
    const int horizon = inst.horizon(m);
    const bool elided = budget >= 1 && !map.contains({VarDesc::Kind::Dummy, m, 0, 1});
    for (int t = 1; t <= horizon; ++t) {
      std::vector<std::pair<int, double>> terms;
      double target = 1.0;
      if (t <= budget) {  // head slot: y_mt counts as occupied
        if (elided) continue;
        terms.emplace_back(map.dummy_index(m, t), 1.0);
      } else if (t > jobs) {  // tail slot: occupied unless the head dummy is set
        if (elided) continue;
        terms.emplace_back(map.dummy_index(m, t - jobs), -1.0);
        target = 0.0;  // (sum_j x - y)^2
      }
      for (int j = 1; j <= jobs; ++j) terms.emplace_back(map.real_index(m, j, t), 1.0);
      add_squared_penalty(form, terms, target, p);
    }
  }
  return form;
}

QuadraticForm build_process_order_penalty(const JspInstance& inst, const VariableMap& map) {
  QuadraticForm form;
  const double p = inst.penalty_weight;
  for (int m = 1; m + 1 <= inst.num_machines; ++m) {
    const int horizon = inst.horizon(m);
    const int next_horizon = inst.horizon(m + 1);
    for (int j = 1; j <= inst.num_jobs; ++j)
      for (int t = 2; t <= horizon; ++t)
        for (int tp = 1; tp <= std::min(t - 1, next_horizon); ++tp)
          form.add_quadratic(map.real_index(m, j, t), map.real_index(m + 1, j, tp), p);
  }
  return form;
}

QuadraticForm build_idle_slot_penalty(const JspInstance& inst, const VariableMap& map) {
  QuadraticForm form;
  const double p = inst.penalty_weight;
  for (int m = 2; m <= inst.num_machines; ++m) {
    const int budget = inst.idle_budget[m - 1];
    for (int t = 1; t + 1 <= budget; ++t) {
      // p * (1 - y_mt) * y_m(t+1)
      const int a = map.dummy_index(m, t), b = map.dummy_index(m, t + 1);
      form.add_linear(b, p);
      form.add_quadratic(a, b, -p);
    }
  }
  return form;
}

Qubo assemble_qubo(const JspInstance& inst, bool elide_small_dummies) {
  VariableMap map = VariableMap::build(inst, elide_small_dummies);
  QuadraticForm form = build_delivery_cost(inst, map);
  form.add_scaled(build_production_cost(inst, map), 1.0);
  form.add_scaled(build_job_assignment_penalty(inst, map), 1.0);
  form.add_scaled(build_time_assignment_penalty(inst, map), 1.0);
  form.add_scaled(build_process_order_penalty(inst, map), 1.0);
  form.add_scaled(build_idle_slot_penalty(inst, map), 1.0);
  return {std::move(form), std::move(map)};
}

VariableCounts count_variables(int num_jobs, int num_machines,
                               const std::vector<int>& idle_budget) {
  if (num_jobs < 1 || num_machines < 1)
    throw std::invalid_argument("count_variables: need at least one job and one machine");
  if (static_cast<int>(idle_budget.size()) != num_machines)
    throw std::invalid_argument("count_variables: idle_budget size mismatch");
  VariableCounts counts;
  for (int e : idle_budget) {
    if (e < 0) throw std::invalid_argument("count_variables: negative idle budget");
    counts.real_vars += static_cast<long long>(num_jobs) * (num_jobs + e);
    counts.dummy_vars += e;
  }
  counts.total = counts.real_vars + counts.dummy_vars;
  return counts;
}

VariableCounts worst_case_variables(int num_jobs, int num_machines) {
  std::vector<int> budget(num_machines);
  for (int m = 1; m <= num_machines; ++m) budget[m - 1] = (m - 1) * (num_jobs - 1);
  return count_variables(num_jobs, num_machines, budget);
}

const char* constraint_family_name(ConstraintFamily f) {
  switch (f) {
    case ConstraintFamily::JobAssignment: return "job-assignment";
    case ConstraintFamily::TimeAssignment: return "time-assignment";
    case ConstraintFamily::ProcessOrder: return "process-order";
    case ConstraintFamily::IdleSlot: return "idle-slot";
  }
  return "?";
}

ScheduleCost evaluate_schedule_cost(const JspInstance& inst, const VariableMap& map,
                                    const std::vector<std::uint8_t>& bits) {
  if (static_cast<int>(bits.size()) != map.size())
    throw std::invalid_argument("evaluate_schedule_cost: bitstring length mismatch");

  const int jobs = inst.num_jobs;
  auto x = [&](int m, int j, int t) -> int { return bits[map.real_index(m, j, t)]; };
  auto dummy_elided = [&](int m) {
    return inst.idle_budget[m - 1] >= 1 && !map.contains({VarDesc::Kind::Dummy, m, 0, 1});
  };
  auto y = [&](int m, int t) -> int { return bits[map.dummy_index(m, t)]; };

  // Job assignment: each (m, j) placed exactly once.
  for (int m = 1; m <= inst.num_machines; ++m)
    for (int j = 1; j <= jobs; ++j) {
      int placed = 0;
      for (int t = 1; t <= inst.horizon(m); ++t) placed += x(m, j, t);
      if (placed != 1) return {false, 0.0, ConstraintFamily::JobAssignment};
    }

  // Time assignment: every slot carries exactly one job (dummies included).
  for (int m = 1; m <= inst.num_machines; ++m) {
    const int budget = inst.idle_budget[m - 1];
    const bool elided = dummy_elided(m);
    for (int t = 1; t <= inst.horizon(m); ++t) {
      int occupancy = 0;
      for (int j = 1; j <= jobs; ++j) occupancy += x(m, j, t);
      if (t <= budget) {  // head slot
        if (elided) continue;  // row implied by the remaining constraints
        occupancy += y(m, t);
      } else if (t > jobs) {  // tail slot
        if (elided) continue;
        occupancy += 1 - y(m, t - jobs);
      }
      if (occupancy != 1) return {false, 0.0, ConstraintFamily::TimeAssignment};
    }
  }

  // Process order: a job may not run on machine m+1 before its machine-m slot.
  for (int m = 1; m + 1 <= inst.num_machines; ++m)
    for (int j = 1; j <= jobs; ++j)
      for (int t = 2; t <= inst.horizon(m); ++t)
        for (int tp = 1; tp <= std::min(t - 1, inst.horizon(m + 1)); ++tp)
          if (x(m, j, t) && x(m + 1, j, tp)) return {false, 0.0, ConstraintFamily::ProcessOrder};

  // Idle slots: no real-to-dummy transition within the head run.
  for (int m = 2; m <= inst.num_machines; ++m)
    for (int t = 1; t + 1 <= inst.idle_budget[m - 1]; ++t)
      if (!y(m, t) && y(m, t + 1)) return {false, 0.0, ConstraintFamily::IdleSlot};

  // Delivery cost on the last machine.
  double cost = 0.0;
  for (int j = 1; j <= jobs; ++j) {
    const int due = inst.due_time[j - 1];
    for (int t = 1; t <= inst.horizon(inst.num_machines); ++t) {
      if (!x(inst.num_machines, j, t)) continue;
      cost += t <= due ? inst.cost_early * (due - t) : inst.cost_late * (t - due);
    }
  }
  // Production cost for group switches between consecutive slots.
  for (int m = 1; m <= inst.num_machines; ++m) {
    const auto& groups = inst.production_group[m - 1];
    for (int t = 1; t + 1 <= inst.horizon(m); ++t)
      for (int j1 = 1; j1 <= jobs; ++j1)
        for (int j2 = 1; j2 <= jobs; ++j2)
          if (x(m, j1, t) && x(m, j2, t + 1) && groups[j1 - 1] != groups[j2 - 1])
            cost += inst.cost_switch;
  }
  return {true, cost, ConstraintFamily::JobAssignment};
}

FixedQubo fix_variables(const QuadraticForm& form, const VariableMap& map,
                        const std::vector<FixedVar>& assignments) {
  ReducedForm reduced = reduce_form(form, map.size(), assignments);
  std::vector<VarDesc> free_vars;
  free_vars.reserve(reduced.free_to_full.size());
  for (int full : reduced.free_to_full) free_vars.push_back(map.at(full));
  QuadraticForm reduced_form = reduced.form;
  return {std::move(reduced_form), VariableMap::from_descriptors(std::move(free_vars)),
          std::move(reduced)};
}

}  // namespace jsvqa
