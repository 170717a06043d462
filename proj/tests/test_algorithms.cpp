#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "jsvqa/algorithms.hpp"
#include "jsvqa/errors.hpp"
#include "jsvqa/instance_io.hpp"
#include "jsvqa/trace_io.hpp"
#include "test_util.hpp"

using namespace jsvqa;

namespace {

Problem bundled_problem(const std::string& name) {
  const InstanceFile file = load_instance(testutil::instance_path(name));
  const Qubo qubo = assemble_qubo(file.instance);
  const FixedQubo fixed =
      fix_variables(qubo.form, qubo.map, resolve_fixes(file, qubo.map));
  return make_problem(qubo_to_ising(fixed.form, fixed.map.size()), 0.0, "test");
}

Problem random_problem(SplitMix64& rng, int n) {
  QuadraticForm f;
  for (int i = 0; i < n; ++i) f.add_linear(i, rng.next_double() * 2 - 1);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) f.add_quadratic(i, j, rng.next_double() * 2 - 1);
  return make_problem(qubo_to_ising(f, n));
}

std::vector<double> random_theta(SplitMix64& rng, int count) {
  std::vector<double> theta(count);
  for (double& v : theta) v = rng.next_double() * 2 * M_PI - M_PI;
  return theta;
}

}  // namespace

TEST_CASE("cobyla: 1-D quadratic") {
  auto quadratic = [](std::span<const double> x) { return (x[0] - 3.0) * (x[0] - 3.0); };
  const auto result = cobyla_minimize(quadratic, {0.0}, {0.5, 1e-4, 500});
  CHECK(std::abs(result.best_point[0] - 3.0) <= 1e-3);
  CHECK(result.reached_rho_end);
}

TEST_CASE("cobyla: Rosenbrock within the reference budget") {
  // At rho_begin = 2 the reference linear-approximation optimizer reaches
  // f < 1e-2 from (-1.2, 1) inside 500 evaluations; hold this build to that.
  auto rosenbrock = [](std::span<const double> x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  const auto result = cobyla_minimize(rosenbrock, {-1.2, 1.0}, {2.0, 1e-4, 500});
  CHECK(result.best_value < 1e-2);
  CHECK(result.evaluations <= 500);
}

TEST_CASE("cobyla: constant objective terminates at rho_end") {
  int calls = 0;
  auto constant = [&](std::span<const double>) { ++calls; return 7.0; };
  const auto result = cobyla_minimize(constant, {1.0, 2.0, 3.0}, {0.5, 1e-4, 500});
  CHECK(result.reached_rho_end);
  CHECK(result.best_value == 7.0);
  CHECK(result.evaluations == calls);
  CHECK(result.evaluations < 100);
}

TEST_CASE("cobyla: non-finite objective aborts with a diagnostic") {
  auto bad = [](std::span<const double> x) {
    return x[0] > 0.1 ? std::numeric_limits<double>::quiet_NaN() : 0.0;
  };
  CHECK_THROWS_AS(cobyla_minimize(bad, {0.0, 0.0}, {0.5, 1e-4, 100}), std::runtime_error);
}

TEST_CASE("cobyla: deterministic for a deterministic objective") {
  auto bowl = [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += std::cos(v) + v * v * 0.1;
    return s;
  };
  const auto a = cobyla_minimize(bowl, {0.3, -0.7, 1.1}, {0.5, 1e-4, 300});
  const auto b = cobyla_minimize(bowl, {0.3, -0.7, 1.1}, {0.5, 1e-4, 300});
  CHECK(a.best_point == b.best_point);
  CHECK(a.best_value == b.best_value);
  CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("mclachlan matrix: diagonal, symmetry, finite differences") {
  SplitMix64 rng(3);
  const HardwareEfficientAnsatz ansatz{3, 1};
  const auto theta = random_theta(rng, ansatz.param_count());
  const auto a = mclachlan_matrix(ansatz, theta, EstimatorMode::Exact, 0, 0);
  const int dim = ansatz.param_count();
  for (int j = 0; j < dim; ++j) CHECK(std::abs(a[j * dim + j] - 0.25) < 1e-10);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) CHECK(std::abs(a[i * dim + j] - a[j * dim + i]) < 1e-12);

  // Finite-difference overlap oracle.
  const double h = 1e-5;
  auto state_at = [&](int j, double delta) {
    auto shifted = theta;
    shifted[j] += delta;
    return prepare_he_state(ansatz, shifted);
  };
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) {
      const StateVector ip = state_at(i, h), im = state_at(i, -h);
      const StateVector jp = state_at(j, h), jm = state_at(j, -h);
      double re = 0.0;
      for (std::size_t z = 0; z < ip.amp.size(); ++z) {
        const auto di = (ip.amp[z] - im.amp[z]) / (2.0 * h);
        const auto dj = (jp.amp[z] - jm.amp[z]) / (2.0 * h);
        re += (std::conj(di) * dj).real();
      }
      CHECK(std::abs(a[i * dim + j] - re) < 1e-6);
    }
}

TEST_CASE("mclachlan matrix: sampled mode is deterministic and consistent") {
  SplitMix64 rng(5);
  const HardwareEfficientAnsatz ansatz{3, 1};
  const auto theta = random_theta(rng, ansatz.param_count());
  const auto exact = mclachlan_matrix(ansatz, theta, EstimatorMode::Exact, 0, 0);
  const auto s1 = mclachlan_matrix(ansatz, theta, EstimatorMode::Sampled, 40000, 7);
  const auto s2 = mclachlan_matrix(ansatz, theta, EstimatorMode::Sampled, 40000, 7);
  CHECK(s1 == s2);
  const int dim = ansatz.param_count();
  for (int j = 0; j < dim; ++j) CHECK(s1[j * dim + j] == doctest::Approx(0.25));  // p = 1 draws
  for (int i = 0; i < dim * dim; ++i) CHECK(std::abs(s1[i] - exact[i]) < 0.02);
}

TEST_CASE("vqe on one qubit reaches the ground state") {
  QuadraticForm f;
  f.add_linear(0, 1.0);
  const Problem problem = make_problem(qubo_to_ising(f, 1));
  RunConfig config;
  config.algorithm = Algorithm::Vqe;
  config.layers = 1;
  config.mode = EstimatorMode::Exact;
  config.alpha = Quantile::parse("1");
  config.max_iterations = 50;
  const Trace trace = run_vqe(problem, config);
  CHECK(trace.final_pgs >= 0.99);
  CHECK(trace.records.size() <= 50);
  for (const auto& r : trace.records) {
    CHECK_FALSE(r.tau.has_value());
    CHECK_FALSE(r.grad_norm.has_value());
    CHECK(r.epsilon >= 0.0);
    CHECK(r.epsilon <= 1.0);
    CHECK(r.pgs >= 0.0);
    CHECK(r.pgs <= 1.0);
  }
}

TEST_CASE("qaoa objective path and improvement over the uniform state") {
  QuadraticForm f;
  f.add_quadratic(0, 1, 1.0);
  const Problem problem = make_problem(qubo_to_ising(f, 2));
  const auto table = diagonal_energies(problem.hamiltonian);

  // Zero angles leave the uniform state, so the objective equals the
  // uniform-state CVaR.
  const StateVector zero_angles = prepare_qaoa_state(problem.hamiltonian, {{0.0}, {0.0}});
  CHECK(exact_cvar(zero_angles, table, 1.0) ==
        doctest::Approx(exact_cvar(StateVector::uniform_state(2), table, 1.0)));

  // Coarse grid scan oracle for the best p=1 mean energy.
  double grid_best = 1e300;
  for (int bi = 0; bi < 40; ++bi)
    for (int gi = 0; gi < 40; ++gi) {
      const QaoaParams params{{bi * M_PI / 40.0}, {gi * M_PI / 40.0}};
      grid_best = std::min(
          grid_best, exact_expectation(prepare_qaoa_state(problem.hamiltonian, params), table));
    }
  CHECK(grid_best < 0.25);

  RunConfig config;
  config.algorithm = Algorithm::Qaoa;
  config.layers = 1;
  config.mode = EstimatorMode::Exact;
  config.alpha = Quantile::parse("1");
  config.max_iterations = 120;
  config.seed = 3;
  const Trace trace = run_qaoa(problem, config);
  const double final_mean = trace.records.empty() ? 1e300 : trace.records.back().mean_energy;
  double best_mean = 1e300;
  for (const auto& r : trace.records) best_mean = std::min(best_mean, r.mean_energy);
  CHECK(best_mean < 0.25);          // improves on the uniform state
  CHECK(best_mean < grid_best + 0.02);  // and is competitive with the scan
  (void)final_mean;
}

TEST_CASE("varqite on one qubit follows the closed-form Euler flow") {
  QuadraticForm f;
  f.add_linear(0, 1.0);
  const Problem problem = make_problem(qubo_to_ising(f, 1));
  RunConfig config;
  config.algorithm = Algorithm::VarQite;
  config.layers = 0;
  config.mode = EstimatorMode::Exact;
  config.dtau = 0.01;
  config.max_iterations = 350;
  const Trace trace = run_varqite(problem, config);

  // Closed form: <H>(theta) = sin^2(theta/2), A = 1/4, so the Euler update is
  // theta <- theta - sin(theta) dtau / (1 + 4 lambda).
  double theta = M_PI / 2.0;
  double previous = 1e300;
  for (const auto& r : trace.records) {
    const double expected = std::sin(theta / 2.0) * std::sin(theta / 2.0);
    CHECK(std::abs(r.mean_energy - expected) < 1e-9);
    CHECK(r.mean_energy < previous);  // strict decrease
    previous = r.mean_energy;
    theta -= std::sin(theta) * config.dtau / (1.0 + 4.0 * config.lambda);
  }
  CHECK(trace.records.back().mean_energy < 1e-3);  // reached within 350 steps
  CHECK(trace.termination == "completed");
}

TEST_CASE("varqite with huge lambda degenerates to scaled gradient descent") {
  SplitMix64 rng(7);
  const Problem problem = random_problem(rng, 3);
  RunConfig config;
  config.algorithm = Algorithm::VarQite;
  config.layers = 1;
  config.mode = EstimatorMode::Exact;
  config.lambda = 1e6;
  config.dtau = 1.0;
  config.max_iterations = 1;
  const Trace trace = run_varqite(problem, config);

  // Compare the single update against -grad(O) * dtau / lambda.
  const HardwareEfficientAnsatz ansatz{3, 1};
  const auto theta0 = ansatz.plus_state_params();
  const auto table = diagonal_energies(problem.hamiltonian);
  for (int j = 0; j < ansatz.param_count(); ++j) {
    auto shifted = theta0;
    shifted[j] += M_PI / 2.0;
    const double plus = exact_expectation(prepare_he_state(ansatz, shifted), table);
    shifted[j] = theta0[j] - M_PI / 2.0;
    const double minus = exact_expectation(prepare_he_state(ansatz, shifted), table);
    const double grad = (plus - minus) / 4.0;  // objective is half the mean
    const double step = trace.terminal_params[j] - theta0[j];
    CHECK(std::abs(step + grad * config.dtau / config.lambda) < 1e-8 / config.lambda + 1e-12);
  }
}

TEST_CASE("varqite descent property on the bundled 5-variable instance") {
  const Problem problem = bundled_problem("jsp20x2_n5.json");
  RunConfig config;
  config.algorithm = Algorithm::VarQite;
  config.layers = 2;
  config.mode = EstimatorMode::Exact;
  config.dtau = 0.05;
  config.max_iterations = 60;
  const Trace trace = run_varqite(problem, config);
  REQUIRE(trace.truncation_error.empty());
  double previous = 1e300;
  for (const auto& r : trace.records) {
    CHECK(r.mean_energy <= previous + 1e-8);
    previous = r.mean_energy;
  }
}

TEST_CASE("fvqe on one qubit converges quickly") {
  QuadraticForm f;
  f.add_linear(0, 1.0);
  const Problem problem = make_problem(qubo_to_ising(f, 1));
  RunConfig config;
  config.algorithm = Algorithm::Fvqe;
  config.layers = 0;
  config.mode = EstimatorMode::Exact;
  config.max_iterations = 30;
  const Trace trace = run_fvqe(problem, config);
  CHECK(trace.final_pgs >= 0.99);
  for (const auto& r : trace.records) {
    CHECK(r.tau.has_value());
    CHECK(r.grad_norm.has_value());
  }
}

TEST_CASE("fvqe zero-gradient start leaves parameters unchanged") {
  // Parity Hamiltonian: shifting any parameter by +-pi/2 from |+...+> gives
  // the same filtered-energy distribution, so every gradient component is 0.
  QuadraticForm f;
  f.add_linear(0, 1.0);
  f.add_linear(1, 1.0);
  f.add_quadratic(0, 1, -2.0);
  const Problem problem = make_problem(qubo_to_ising(f, 2));
  RunConfig config;
  config.algorithm = Algorithm::Fvqe;
  config.layers = 0;
  config.mode = EstimatorMode::Exact;
  config.max_iterations = 5;
  const Trace trace = run_fvqe(problem, config);
  REQUIRE(trace.records.size() == 5);
  const HardwareEfficientAnsatz ansatz{2, 0};
  const auto theta0 = ansatz.plus_state_params();
  for (int j = 0; j < 2; ++j)
    CHECK(trace.terminal_params[j] == doctest::Approx(theta0[j]));
  for (const auto& r : trace.records) {
    CHECK(*r.grad_norm == doctest::Approx(0.0));
    CHECK(*r.tau == doctest::Approx(config.tau_grid.max));
  }
}

TEST_CASE("small exact-mode steps never increase the objectives") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 3; ++trial) {
    const Problem problem = random_problem(rng, 3);
    const auto table = diagonal_energies(problem.hamiltonian);
    const HardwareEfficientAnsatz ansatz{3, 1};
    const auto theta0 = random_theta(rng, ansatz.param_count());
    const double shift = positivity_shift_for(problem.hamiltonian, std::nullopt);

    // F-VQE: one eta = 1e-3 step against the step's own filtered target.
    const FvqeStep step = collect_fvqe_step(ansatz, theta0, table, shift,
                                            EstimatorMode::Exact, 0, 0);
    const double tau = adapt_tau(step, TauGrid{}, 0.1);
    const auto grad = step.gradient(tau);
    auto theta1 = theta0;
    for (std::size_t j = 0; j < theta1.size(); ++j) theta1[j] -= 1e-3 * grad[j];
    const StateVector psi0 = prepare_he_state(ansatz, theta0);
    const StateVector psi1 = prepare_he_state(ansatz, theta1);
    const FilterConfig fc{tau, shift};
    CHECK(fvqe_objective_exact(psi1, psi0, problem.hamiltonian, fc) <=
          fvqe_objective_exact(psi0, psi0, problem.hamiltonian, fc) + 1e-12);
  }

  // VarQITE with a small step on a random instance.
  const Problem problem = random_problem(rng, 3);
  RunConfig config;
  config.algorithm = Algorithm::VarQite;
  config.layers = 1;
  config.mode = EstimatorMode::Exact;
  config.dtau = 1e-3;
  config.max_iterations = 5;
  const Trace trace = run_varqite(problem, config);
  double previous = 1e300;
  for (const auto& r : trace.records) {
    CHECK(r.mean_energy <= previous + 1e-12);
    previous = r.mean_energy;
  }
}

TEST_CASE("traces are deterministic for identical config, seed and instance") {
  const Problem problem = bundled_problem("jsp20x2_n5.json");
  RunConfig config;
  config.algorithm = Algorithm::Fvqe;
  config.layers = 2;
  config.shots = 200;
  config.seed = 42;
  config.max_iterations = 8;
  const Trace a = run_fvqe(problem, config);
  const Trace b = run_fvqe(problem, config);
  CHECK(trace_to_csv(a) == trace_to_csv(b));

  config.algorithm = Algorithm::Vqe;
  config.max_iterations = 20;
  const Trace c = run_vqe(problem, config);
  const Trace d = run_vqe(problem, config);
  CHECK(trace_to_csv(c) == trace_to_csv(d));
}

TEST_CASE("fvqe and varqite trajectories are invariant under constant energy shifts") {
  SplitMix64 rng(13);
  const Problem base = random_problem(rng, 3);
  Problem lifted = base;
  lifted.hamiltonian.h0 += 17.5;
  lifted.extrema.min_energy += 17.5;
  lifted.extrema.max_energy += 17.5;

  RunConfig config;
  config.layers = 1;
  config.mode = EstimatorMode::Exact;
  config.max_iterations = 10;

  config.algorithm = Algorithm::Fvqe;
  const Trace f0 = run_fvqe(base, config);
  const Trace f1 = run_fvqe(lifted, config);
  REQUIRE(f0.terminal_params.size() == f1.terminal_params.size());
  for (std::size_t j = 0; j < f0.terminal_params.size(); ++j)
    CHECK(std::abs(f0.terminal_params[j] - f1.terminal_params[j]) < 1e-9);
  for (std::size_t i = 0; i < f0.records.size(); ++i)
    CHECK(std::abs(f0.records[i].epsilon - f1.records[i].epsilon) < 1e-9);

  config.algorithm = Algorithm::VarQite;
  const Trace v0 = run_varqite(base, config);
  const Trace v1 = run_varqite(lifted, config);
  for (std::size_t j = 0; j < v0.terminal_params.size(); ++j)
    CHECK(std::abs(v0.terminal_params[j] - v1.terminal_params[j]) < 1e-9);
}

TEST_CASE("compute_metrics on reference states") {
  const Problem problem = bundled_problem("jsp20x2_n5.json");
  const auto table = diagonal_energies(problem.hamiltonian);
  REQUIRE(problem.extrema.ground_set.size() == 1);

  StateVector ground = StateVector::zero_state(5);
  std::swap(ground.amp[0], ground.amp[problem.extrema.ground_set[0]]);
  auto [eps_g, pgs_g] = compute_metrics(ground, table, problem.extrema, RescaleMode::MinMax);
  CHECK(eps_g == doctest::Approx(0.0));
  CHECK(pgs_g == doctest::Approx(1.0));

  const StateVector uniform = StateVector::uniform_state(5);
  auto [eps_u, pgs_u] = compute_metrics(uniform, table, problem.extrema, RescaleMode::MinMax);
  CHECK(pgs_u == doctest::Approx(1.0 / 32.0));
  CHECK(eps_u > 0.0);
  CHECK(eps_u < 1.0);

  // Highest-energy basis state.
  std::uint64_t argmax = 0;
  for (std::uint64_t z = 1; z < table.size(); ++z)
    if (table[z] > table[argmax]) argmax = z;
  StateVector top = StateVector::zero_state(5);
  std::swap(top.amp[0], top.amp[argmax]);
  auto [eps_t, pgs_t] = compute_metrics(top, table, problem.extrema, RescaleMode::MinMax);
  CHECK(eps_t == doctest::Approx(1.0));
  CHECK(pgs_t == doctest::Approx(0.0));

  // The max-only normalization is recorded per run and differs from minmax.
  auto [eps_m, pgs_m] = compute_metrics(ground, table, problem.extrema, RescaleMode::MaxOnly);
  CHECK(eps_m == doctest::Approx(problem.extrema.min_energy / problem.extrema.max_energy));
  (void)pgs_m;
}

TEST_CASE("all four drivers emit schema-identical traces on the bundled instance") {
  const Problem problem = bundled_problem("jsp20x2_n5.json");
  RunConfig config;
  config.layers = 2;
  config.shots = 100;
  config.seed = 9;
  config.max_iterations = 6;
  for (Algorithm algo :
       {Algorithm::Vqe, Algorithm::Qaoa, Algorithm::VarQite, Algorithm::Fvqe}) {
    config.algorithm = algo;
    const Trace trace = run_algorithm(problem, config);
    REQUIRE_FALSE(trace.records.empty());
    int expected_iteration = 0;
    for (const auto& r : trace.records) {
      CHECK(r.iteration == expected_iteration++);
      CHECK(r.epsilon >= 0.0);
      CHECK(r.epsilon <= 1.0);
      CHECK(r.pgs >= 0.0);
      CHECK(r.pgs <= 1.0);
      CHECK(r.evaluations > 0);
    }
    CHECK_FALSE(trace.termination.empty());
  }
}

TEST_CASE("run config validation") {
  RunConfig config;
  config.shots = 0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = RunConfig{};
  config.algorithm = Algorithm::Qaoa;
  config.layers = 0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = RunConfig{};
  config.eta = 0.0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  CHECK_THROWS_AS(parse_algorithm("annealer"), ConfigError);
  CHECK(parse_algorithm("fvqe") == Algorithm::Fvqe);
}
