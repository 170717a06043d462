#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "jsvqa/errors.hpp"
#include "jsvqa/instance_io.hpp"
#include "jsvqa/jsp.hpp"
#include "test_util.hpp"

using namespace jsvqa;
using testutil::bits_of;

namespace {

JspInstance tiny_instance(int jobs, int machines, std::vector<int> idle) {
  JspInstance inst;
  inst.num_jobs = jobs;
  inst.num_machines = machines;
  inst.idle_budget = std::move(idle);
  inst.due_time.assign(jobs, 1);
  inst.production_group.assign(machines, std::vector<std::string>(jobs, "a"));
  inst.cost_early = 1.0;
  inst.cost_late = 2.0;
  inst.cost_switch = 1.0;
  inst.penalty_weight = 2.0;
  return inst;
}

double linear_coeff(const QuadraticForm& f, int i) {
  const auto it = f.linear.find(i);
  return it == f.linear.end() ? 0.0 : it->second;
}

double quad_coeff(const QuadraticForm& f, int i, int j) {
  const auto it = f.quadratic.find(std::minmax(i, j));
  return it == f.quadratic.end() ? 0.0 : it->second;
}

}  // namespace

TEST_CASE("horizon is J + e_m") {
  JspInstance inst = tiny_instance(20, 2, {0, 2});
  inst.due_time.assign(20, 5);
  CHECK(inst.horizon(2) == 22);
  CHECK(tiny_instance(1, 1, {0}).horizon(1) == 1);
  JspInstance three = tiny_instance(3, 2, {0, 2});
  CHECK(three.horizon(2) == 5);
  CHECK_THROWS_AS(three.horizon(0), std::out_of_range);
  CHECK_THROWS_AS(three.horizon(3), std::out_of_range);
}

TEST_CASE("instance validation names the broken invariant") {
  JspInstance inst = tiny_instance(2, 2, {0, 1});
  CHECK_NOTHROW(inst.validate());
  JspInstance bad = inst;
  bad.due_time[0] = 4;  // T_M = 3
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = inst;
  bad.penalty_weight = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = inst;
  bad.cost_late = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = inst;
  bad.production_group[0].pop_back();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("variable map ordering is (m, j, t) then (m, t)") {
  const JspInstance inst = tiny_instance(2, 2, {1, 2});
  const VariableMap map = VariableMap::build(inst);
  const auto counts = count_variables(2, 2, {1, 2});
  CHECK(map.size() == counts.total);
  // First real variable block: machine 1, job 1, slots 1..3.
  CHECK(map.at(0) == VarDesc{VarDesc::Kind::Real, 1, 1, 1});
  CHECK(map.at(1) == VarDesc{VarDesc::Kind::Real, 1, 1, 2});
  CHECK(map.at(2) == VarDesc{VarDesc::Kind::Real, 1, 1, 3});
  CHECK(map.at(3) == VarDesc{VarDesc::Kind::Real, 1, 2, 1});
  // Dummies come last, sorted by (m, t).
  CHECK(map.at(map.size() - 3) == VarDesc{VarDesc::Kind::Dummy, 1, 0, 1});
  CHECK(map.at(map.size() - 2) == VarDesc{VarDesc::Kind::Dummy, 2, 0, 1});
  CHECK(map.at(map.size() - 1) == VarDesc{VarDesc::Kind::Dummy, 2, 0, 2});
  CHECK(map.real_index(2, 1, 1) == 2 * 3);
  CHECK_THROWS_AS(map.real_index(1, 1, 4), std::out_of_range);
}

TEST_CASE("dummy elision drops e_m <= 1 machines from the dummy tail") {
  const JspInstance inst = tiny_instance(2, 3, {1, 2, 1});
  const VariableMap full = VariableMap::build(inst, false);
  const VariableMap elided = VariableMap::build(inst, true);
  CHECK(full.size() - elided.size() == 2);  // machines 1 and 3 lose one dummy each
  CHECK(elided.contains({VarDesc::Kind::Dummy, 2, 0, 1}));
  CHECK(elided.contains({VarDesc::Kind::Dummy, 2, 0, 2}));
  CHECK_FALSE(elided.contains({VarDesc::Kind::Dummy, 1, 0, 1}));
  CHECK_FALSE(elided.contains({VarDesc::Kind::Dummy, 3, 0, 1}));
}

TEST_CASE("delivery cost coefficients") {
  JspInstance inst = tiny_instance(1, 1, {4});  // T = 5
  inst.due_time = {3};
  const VariableMap map = VariableMap::build(inst);
  const QuadraticForm form = build_delivery_cost(inst, map);
  CHECK(linear_coeff(form, map.real_index(1, 1, 1)) == doctest::Approx(2.0));  // c_e (3-1)
  CHECK(linear_coeff(form, map.real_index(1, 1, 3)) == 0.0);                   // on time
  CHECK(linear_coeff(form, map.real_index(1, 1, 5)) == doctest::Approx(4.0));  // c_l (5-3)
  CHECK(form.quadratic.empty());
  CHECK(form.constant == 0.0);
}

TEST_CASE("production cost follows the group switch matrix") {
  JspInstance inst = tiny_instance(2, 1, {0});
  inst.cost_switch = 5.0;

  SUBCASE("same group everywhere: no terms") {
    const VariableMap map = VariableMap::build(inst);
    CHECK(build_production_cost(inst, map).term_count() == 0);
  }
  SUBCASE("different groups: coefficient c_p on each adjacent-slot ordered pair") {
    inst.production_group[0] = {"a", "b"};
    const VariableMap map = VariableMap::build(inst);
    const QuadraticForm form = build_production_cost(inst, map);
    // J=2, T=2: the double sum leaves (j1=1,j2=2) and (j1=2,j2=1) at t=1.
    CHECK(form.quadratic.size() == 2);
    CHECK(quad_coeff(form, map.real_index(1, 1, 1), map.real_index(1, 2, 2)) ==
          doctest::Approx(5.0));
    CHECK(quad_coeff(form, map.real_index(1, 2, 1), map.real_index(1, 1, 2)) ==
          doctest::Approx(5.0));
    CHECK(form.linear.empty());
  }
}

TEST_CASE("job assignment penalty expansion") {
  SUBCASE("single slot: p (x - 1)^2 = p - p x") {
    JspInstance inst = tiny_instance(1, 1, {0});
    inst.penalty_weight = 2.0;
    const VariableMap map = VariableMap::build(inst);
    const QuadraticForm form = build_job_assignment_penalty(inst, map);
    CHECK(form.constant == doctest::Approx(2.0));
    CHECK(linear_coeff(form, 0) == doctest::Approx(-2.0));
    CHECK(form.quadratic.empty());
  }
  SUBCASE("two slots: 1 - x1 - x2 + 2 x1 x2") {
    JspInstance inst = tiny_instance(1, 1, {1});
    inst.penalty_weight = 1.0;
    const VariableMap map = VariableMap::build(inst);
    const QuadraticForm form = build_job_assignment_penalty(inst, map);
    const int x1 = map.real_index(1, 1, 1), x2 = map.real_index(1, 1, 2);
    CHECK(form.constant == doctest::Approx(1.0));
    CHECK(linear_coeff(form, x1) == doctest::Approx(-1.0));
    CHECK(linear_coeff(form, x2) == doctest::Approx(-1.0));
    CHECK(quad_coeff(form, x1, x2) == doctest::Approx(2.0));
  }
}

TEST_CASE("time assignment head slot matches symbolic expansion of (y + x - 1)^2") {
  JspInstance inst = tiny_instance(1, 1, {1});
  inst.penalty_weight = 1.0;
  const VariableMap map = VariableMap::build(inst);
  const QuadraticForm form = build_time_assignment_penalty(inst, map);
  // Enumerate all assignments of (x at both slots, y) and compare against the
  // defining expressions for the head and tail rows.
  const int x1 = map.real_index(1, 1, 1), x2 = map.real_index(1, 1, 2);
  const int y = map.dummy_index(1, 1);
  for (std::uint64_t code = 0; code < 8; ++code) {
    const auto bits = bits_of(code, 3);
    const double head = bits[y] + bits[x1] - 1.0;
    const double tail = 1.0 - bits[y] + bits[x2] - 1.0;
    CHECK(form.evaluate(bits) == doctest::Approx(head * head + tail * tail));
  }
}

TEST_CASE("time assignment with e_m = 0 generates only middle rows") {
  JspInstance inst = tiny_instance(2, 1, {0});
  const VariableMap map = VariableMap::build(inst);
  const QuadraticForm form = build_time_assignment_penalty(inst, map);
  // Two rows of (x_{1,1,t} + x_{1,2,t} - 1)^2, no dummy anywhere.
  CHECK(form.constant == doctest::Approx(2.0 * inst.penalty_weight));
  for (const auto& [ij, v] : form.quadratic) {
    (void)v;
    CHECK(map.at(ij.first).kind == VarDesc::Kind::Real);
    CHECK(map.at(ij.second).kind == VarDesc::Kind::Real);
  }
}

TEST_CASE("process order penalty") {
  SUBCASE("single machine: empty form") {
    const JspInstance inst = tiny_instance(2, 1, {0});
    const VariableMap map = VariableMap::build(inst);
    CHECK(build_process_order_penalty(inst, map).term_count() == 0);
  }
  SUBCASE("violating and satisfying placements") {
    JspInstance wide = tiny_instance(2, 2, {0, 0});
    wide.penalty_weight = 3.0;
    const VariableMap wmap = VariableMap::build(wide);
    const QuadraticForm form = build_process_order_penalty(wide, wmap);
    std::vector<std::uint8_t> bits(wmap.size(), 0);
    bits[wmap.real_index(1, 1, 2)] = 1;  // job 1 on machine 1 at slot 2
    bits[wmap.real_index(2, 1, 1)] = 1;  // and on machine 2 at slot 1
    CHECK(form.evaluate(bits) == doctest::Approx(3.0));
    std::fill(bits.begin(), bits.end(), 0);
    bits[wmap.real_index(1, 1, 1)] = 1;
    bits[wmap.real_index(2, 1, 1)] = 1;  // same slot: allowed
    CHECK(form.evaluate(bits) == doctest::Approx(0.0));
  }
}

TEST_CASE("idle slot penalty") {
  SUBCASE("all budgets <= 1: empty") {
    const JspInstance inst = tiny_instance(2, 2, {1, 1});
    const VariableMap map = VariableMap::build(inst);
    CHECK(build_idle_slot_penalty(inst, map).term_count() == 0);
  }
  SUBCASE("forbidden real-to-dummy transition costs p") {
    JspInstance inst = tiny_instance(2, 2, {0, 2});
    inst.penalty_weight = 7.0;
    const VariableMap map = VariableMap::build(inst);
    const QuadraticForm form = build_idle_slot_penalty(inst, map);
    std::vector<std::uint8_t> bits(map.size(), 0);
    bits[map.dummy_index(2, 2)] = 1;  // y_{2,1} = 0, y_{2,2} = 1
    CHECK(form.evaluate(bits) == doctest::Approx(7.0));
    bits[map.dummy_index(2, 1)] = 1;  // both set: fine
    CHECK(form.evaluate(bits) == doctest::Approx(0.0));
  }
}

TEST_CASE("assemble_qubo on the one-variable instance") {
  JspInstance inst = tiny_instance(1, 1, {0});
  inst.penalty_weight = 2.0;
  const auto [form, map] = assemble_qubo(inst);
  REQUIRE(map.size() == 1);
  // Job and time rows both reduce to p (x-1)^2; delivery at the due slot is 0.
  CHECK(form.evaluate(std::uint64_t{0}) == doctest::Approx(4.0));
  CHECK(form.evaluate(std::uint64_t{1}) == doctest::Approx(0.0));
  const auto result = brute_force_solve(form, 1);
  CHECK(result.ground_set == std::vector<std::uint64_t>{1});
  CHECK(result.min_value == doctest::Approx(0.0));
  CHECK(result.max_value == doctest::Approx(4.0));
}

TEST_CASE("feasible schedules evaluate to their bare cost") {
  SplitMix64 rng(11);
  int feasible_seen = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const JspInstance inst = testutil::random_instance(rng, testutil::small_shapes());
    const auto [form, map] = assemble_qubo(inst);
    const int n = map.size();
    REQUIRE(n <= 12);
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
      const auto bits = bits_of(code, n);
      const double q = form.evaluate(bits);
      const ScheduleCost sc = evaluate_schedule_cost(inst, map, bits);
      if (sc.feasible) {
        ++feasible_seen;
        CHECK(q == doctest::Approx(sc.cost).epsilon(1e-12));
      } else {
        CHECK(q >= inst.penalty_weight - 1e-9);  // at least one violated row
      }
    }
  }
  CHECK(feasible_seen > 0);
}

TEST_CASE("schedule oracle reports the first violated family") {
  JspInstance inst = tiny_instance(1, 1, {0});
  const VariableMap map = VariableMap::build(inst);
  const ScheduleCost missing = evaluate_schedule_cost(inst, map, {0});
  CHECK_FALSE(missing.feasible);
  CHECK(missing.violated == ConstraintFamily::JobAssignment);
  CHECK(std::string(constraint_family_name(missing.violated)) == "job-assignment");

  JspInstance two = tiny_instance(1, 1, {1});
  two.due_time = {1};
  const VariableMap tmap = VariableMap::build(two);
  std::vector<std::uint8_t> bits(tmap.size(), 0);
  bits[tmap.real_index(1, 1, 1)] = 1;
  bits[tmap.real_index(1, 1, 2)] = 1;  // job in two slots
  CHECK(evaluate_schedule_cost(two, tmap, bits).violated == ConstraintFamily::JobAssignment);
  CHECK_THROWS_AS(evaluate_schedule_cost(two, tmap, {0, 1}), std::invalid_argument);
}

TEST_CASE("count_variables formula") {
  const auto c = count_variables(3, 2, {0, 2});
  CHECK(c.real_vars == 24);
  CHECK(c.dummy_vars == 2);
  CHECK(c.total == 26);
  CHECK(worst_case_variables(3, 3).total == 51);
  CHECK(count_variables(1, 1, {0}).total == 1);
}

TEST_CASE("count_variables matches the assembled map length") {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const JspInstance inst = testutil::random_instance(rng, testutil::medium_shapes());
    const VariableMap map = VariableMap::build(inst);
    CHECK(map.size() ==
          count_variables(inst.num_jobs, inst.num_machines, inst.idle_budget).total);
  }
}

TEST_CASE("fix_variables substitution") {
  SUBCASE("3 x0 with x0 := 1 becomes the constant 3") {
    QuadraticForm f;
    f.add_linear(0, 3.0);
    const auto reduced = reduce_form(f, 1, {{0, 1}});
    CHECK(reduced.form.constant == doctest::Approx(3.0));
    CHECK(reduced.form.term_count() == 0);
    CHECK(reduced.free_to_full.empty());
  }
  SUBCASE("x0 x1 with x0 := 0 is the zero form over {x1}") {
    QuadraticForm f;
    f.add_quadratic(0, 1, 1.0);
    const auto reduced = reduce_form(f, 2, {{0, 0}});
    CHECK(reduced.form.constant == 0.0);
    CHECK(reduced.form.term_count() == 0);
    CHECK(reduced.free_to_full == std::vector<int>{1});
  }
  SUBCASE("errors") {
    QuadraticForm f;
    f.add_linear(0, 1.0);
    CHECK_THROWS_AS(reduce_form(f, 1, {{2, 1}}), std::out_of_range);
    CHECK_THROWS_AS(reduce_form(f, 1, {{0, 1}, {0, 0}}), std::invalid_argument);
    CHECK_NOTHROW(reduce_form(f, 1, {{0, 1}, {0, 1}}));  // repeat, not a conflict
  }
}

TEST_CASE("fix_variables commutes with evaluation") {
  SplitMix64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    QuadraticForm f;
    f.add_constant(rng.next_double());
    for (int i = 0; i < 8; ++i) f.add_linear(i, rng.next_double() * 4 - 2);
    for (int i = 0; i < 8; ++i)
      for (int j = i + 1; j < 8; ++j)
        if (rng.next() % 2) f.add_quadratic(i, j, rng.next_double() * 4 - 2);
    std::vector<FixedVar> fixes;
    std::set<int> chosen;
    while (chosen.size() < 3) chosen.insert(static_cast<int>(rng.next() % 8));
    for (int i : chosen) fixes.push_back({i, static_cast<std::uint8_t>(rng.next() % 2)});
    const auto reduced = reduce_form(f, 8, fixes);
    REQUIRE(reduced.free_to_full.size() == 5);
    for (std::uint64_t code = 0; code < 32; ++code) {
      const auto free_bits = bits_of(code, 5);
      CHECK(reduced.form.evaluate(free_bits) ==
            doctest::Approx(f.evaluate(reduced.complete(free_bits))).epsilon(1e-12));
    }
  }
}

TEST_CASE("brute force handles degeneracy and limits") {
  SUBCASE("constant form: every bitstring is a minimizer") {
    QuadraticForm f;
    f.add_constant(2.5);
    const auto result = brute_force_solve(f, 3);
    CHECK(result.ground_set.size() == 8);
    CHECK(result.min_value == doctest::Approx(2.5));
    CHECK(result.max_value == doctest::Approx(2.5));
  }
  SUBCASE("enumeration limit enforced") {
    QuadraticForm f;
    f.add_linear(29, 1.0);
    CHECK_THROWS_AS(brute_force_solve(f, 30), std::invalid_argument);
  }
}

TEST_CASE("brute force minimizers agree with the schedule-cost oracle") {
  SplitMix64 rng(37);
  for (int trial = 0; trial < 15; ++trial) {
    const JspInstance inst = testutil::random_instance(rng, testutil::small_shapes());
    const auto [form, map] = assemble_qubo(inst);
    const auto result = brute_force_solve(form, map.size());
    // Default penalty: the minimum over feasible schedules is the QUBO minimum.
    double best_feasible = std::numeric_limits<double>::infinity();
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << map.size()); ++code) {
      const ScheduleCost sc = evaluate_schedule_cost(inst, map, bits_of(code, map.size()));
      if (sc.feasible) best_feasible = std::min(best_feasible, sc.cost);
    }
    REQUIRE(std::isfinite(best_feasible));
    CHECK(result.min_value == doctest::Approx(best_feasible));
    for (std::uint64_t code : result.ground_set) {
      const ScheduleCost sc = evaluate_schedule_cost(inst, map, bits_of(code, map.size()));
      CHECK(sc.feasible);
      CHECK(sc.cost == doctest::Approx(result.min_value));
    }
  }
}

TEST_CASE("builder outputs carry no self-pairs and no zero coefficients") {
  SplitMix64 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const JspInstance inst = testutil::random_instance(rng, testutil::medium_shapes());
    const VariableMap map = VariableMap::build(inst);
    const QuadraticForm forms[] = {
        build_delivery_cost(inst, map),          build_production_cost(inst, map),
        build_job_assignment_penalty(inst, map), build_time_assignment_penalty(inst, map),
        build_process_order_penalty(inst, map),  build_idle_slot_penalty(inst, map)};
    for (const auto& f : forms) {
      for (const auto& [i, v] : f.linear) {
        CHECK(i >= 0);
        CHECK(v != 0.0);
      }
      for (const auto& [ij, v] : f.quadratic) {
        CHECK(ij.first < ij.second);
        CHECK(v != 0.0);
      }
    }
  }
}

TEST_CASE("assembly with elision keeps values on schedules") {
  // For e_m = 1 machines the head/tail rows are implied; on feasible bit
  // patterns the elided QUBO must still equal the bare schedule cost.
  JspInstance inst = tiny_instance(2, 2, {1, 1});
  inst.due_time = {1, 3};
  inst.production_group[0] = {"a", "b"};
  const auto full = assemble_qubo(inst, false);
  const auto elided = assemble_qubo(inst, true);
  CHECK(full.map.size() == elided.map.size() + 2);
  int feasible = 0;
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << elided.map.size()); ++code) {
    const auto bits = bits_of(code, elided.map.size());
    const ScheduleCost sc = evaluate_schedule_cost(inst, elided.map, bits);
    if (!sc.feasible) continue;
    ++feasible;
    CHECK(elided.form.evaluate(bits) == doctest::Approx(sc.cost));
  }
  CHECK(feasible > 0);
}

TEST_CASE("instance files parse, reject unknown fields, and resolve fixes") {
  const std::string good = R"({
    "jobs": 2, "machines": 1, "idle": [1], "due": [1, 2],
    "groups": [["a", "b"]],
    "cost_early": 1, "cost_late": 2, "cost_switch": 0.5, "penalty": "auto",
    "fix": [{"var": "x", "m": 1, "j": 1, "t": 1, "value": 1}]
  })";
  const InstanceFile file = parse_instance(good, "test");
  CHECK(file.penalty_auto);
  CHECK(file.instance.penalty_weight == doctest::Approx(default_penalty_weight(file.instance)));
  const VariableMap map = VariableMap::build(file.instance);
  const auto fixes = resolve_fixes(file, map);
  REQUIRE(fixes.size() == 1);
  CHECK(fixes[0].index == map.real_index(1, 1, 1));
  CHECK(fixes[0].value == 1);

  CHECK_THROWS_WITH_AS(parse_instance(R"({"jobs": 1})", "test"),
                       doctest::Contains("missing field"), InstanceError);
  const std::string unknown = R"({
    "jobs": 1, "machines": 1, "idle": [0], "due": [1], "groups": [["a"]],
    "cost_early": 0, "cost_late": 0, "cost_switch": 0, "penalty": 1, "bogus": 3
  })";
  CHECK_THROWS_WITH_AS(parse_instance(unknown, "test"), doctest::Contains("bogus"),
                       InstanceError);
  const std::string bad_due = R"({
    "jobs": 1, "machines": 1, "idle": [0], "due": [9], "groups": [["a"]],
    "cost_early": 0, "cost_late": 0, "cost_switch": 0, "penalty": 1
  })";
  CHECK_THROWS_WITH_AS(parse_instance(bad_due, "test"), doctest::Contains("due"),
                       InstanceError);
  CHECK_THROWS_AS(load_instance("/nonexistent/file.json"), InstanceError);
}

TEST_CASE("bundled sub-instances reduce to their advertised sizes") {
  const InstanceFile n5 = load_instance(testutil::instance_path("jsp20x2_n5.json"));
  const auto qubo = assemble_qubo(n5.instance);
  CHECK(qubo.map.size() == 842);
  const auto fixed = fix_variables(qubo.form, qubo.map, resolve_fixes(n5, qubo.map));
  CHECK(fixed.map.size() == 5);
  // Reduced evaluations match the full form on completions.
  SplitMix64 rng(3);
  for (int trial = 0; trial < 16; ++trial) {
    const auto free_bits = bits_of(rng.next() % 32, 5);
    CHECK(fixed.form.evaluate(free_bits) ==
          doctest::Approx(qubo.form.evaluate(fixed.reduction.complete(free_bits))));
  }
}
