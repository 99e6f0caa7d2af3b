#include "qsplit/error.hpp"
#include "qsplit/grid.hpp"
#include "qsplit/splitting.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace qsplit;

namespace {

ProblemSpec kawarada_spec(double a, int n, double delta) {
    ProblemSpec spec{build_uniform(a, n), kawarada(), zero_initial(a)};
    spec.delta = delta;
    return spec;
}

// Root of a continuous g on [lo, hi] with g(lo) < 0 < g(hi).
double bisect(const std::function<double(double)>& g, double lo, double hi) {
    for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::size_t argmax(const Vector& v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

} // namespace

TEST_CASE("propose_tau") {
    const Nonlinearity f = kawarada();
    const Vector zero(4, 0.0), half(4, 0.5);
    CHECK(propose_tau(zero, zero, f, 0.1) == doctest::Approx(0.1));
    CHECK(propose_tau(half, half, f, 0.1) == doctest::Approx(0.025));
    SUBCASE("collapses to delta min (1-U+)^2 when U+ >= U") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(0.0, 0.99);
        for (int trial = 0; trial < 200; ++trial) {
            Vector cur(6), next(6);
            for (int i = 0; i < 6; ++i) {
                cur[i] = u(rng);
                next[i] = cur[i] + (0.999 - cur[i]) * u(rng);
            }
            double m = 1.0;
            for (double v : next) m = std::min(m, (1 - v) * (1 - v));
            CHECK(propose_tau(cur, next, f, 0.07) == doctest::Approx(0.07 * m).epsilon(1e-13));
        }
    }
    const Vector bad{0.2, 1.0};
    CHECK_THROWS_AS(propose_tau(bad, bad, f, 0.1), Error);
}

TEST_CASE("scalar step from rest") {
    // N=1, a=1: A = [-2]; U+ = tau/(1-U+) with tau = delta (1-U+)^2 gives U+ = delta/(1+delta).
    const ProblemSpec spec = kawarada_spec(1.0, 1, 0.1);
    const TridiagonalOperator a = assemble_A(spec.grid);
    SplitState s;
    s.u = {0.0};
    const StepOutcome out = splitting_step(s, a, spec.grid.weights(), spec.f, 0.1, 1e-14, 500);
    CHECK(out.converged);
    CHECK(out.next.u[0] == doctest::Approx(0.1 / 1.1).epsilon(1e-12));
    CHECK(out.tau_used == doctest::Approx(0.1 / (1.1 * 1.1)).epsilon(1e-12));
    CHECK(out.next.k == 1);
    CHECK(out.next.t == doctest::Approx(out.tau_used));
}

TEST_CASE("scalar step from a nonzero state against bisection") {
    const double delta = 0.1, u0 = 0.3;
    const ProblemSpec spec = kawarada_spec(1.0, 1, delta);
    const TridiagonalOperator a = assemble_A(spec.grid);
    // v = u0/(1 + 2 tau) + tau/(1 - v) with tau = delta (1-v)^2.
    const double v = bisect(
        [&](double x) {
            const double tau = delta * (1 - x) * (1 - x);
            return x - u0 / (1 + 2 * tau) - tau / (1 - x);
        },
        u0, 0.999);
    SplitState s;
    s.u = {u0};
    const StepOutcome out = splitting_step(s, a, spec.grid.weights(), spec.f, delta, 1e-14, 500);
    CHECK(std::abs(out.next.u[0] - v) <= 1e-10);
    CHECK(std::abs(out.tau_used - delta * (1 - v) * (1 - v)) <= 1e-10);
}

TEST_CASE("fixed-step solve with tau = 0 is the identity") {
    const ProblemSpec spec = kawarada_spec(1.0, 5, 0.1);
    const TridiagonalOperator a = assemble_A(spec.grid);
    const Vector u{0.1, 0.2, 0.3, 0.2, 0.1};
    Vector guess(5, 0.0);
    solve_fixed_tau(a, spec.f, u, 0.0, guess, 1e-14, 100);
    for (int i = 0; i < 5; ++i) CHECK(guess[i] == u[i]);
    const Vector same = u;
    CHECK(scheme_residual(a, spec.grid.weights(), spec.f, u, same, 0.0) == 0.0);
}

TEST_CASE("singularity contact inside the fixed-step solve") {
    const ProblemSpec spec = kawarada_spec(1.0, 1, 0.1);
    const TridiagonalOperator a = assemble_A(spec.grid);
    const Vector u{0.95};
    Vector guess{0.95};
    // With tau this large the fixed point does not exist below 1.
    try {
        solve_fixed_tau(a, spec.f, u, 0.5, guess, 1e-14, 500);
        FAIL("expected singularity contact");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SingularityContact);
    }
}

TEST_CASE("monotone growth on a moderate grid") {
    const ProblemSpec spec = kawarada_spec(std::sqrt(2.0), 19, 0.05);
    const Trajectory traj = run_to_quench(spec, 1e-13);
    REQUIRE(traj.summary.quenched);
    for (std::size_t k = 1; k < traj.states.size(); ++k) {
        for (std::size_t i = 0; i < traj.states[k].size(); ++i) CHECK(traj.states[k][i] > traj.states[k - 1][i]);
    }
}

TEST_CASE("monotonicity monitor flags boundary decreases on a fine grid") {
    // With tau0 / h^2 large the resolvent pulls boundary nodes down in the second step.
    ProblemSpec spec = kawarada_spec(std::sqrt(2.0), 99, 0.1);
    const Trajectory traj = run_to_quench(spec, 1e-13);
    CHECK(traj.summary.termination == Termination::StructureViolation);
    REQUIRE(!traj.summary.violations.empty());
    const auto& hard = *std::find_if(traj.summary.violations.begin(), traj.summary.violations.end(),
                                     [](const Violation& v) { return v.hard; });
    CHECK(hard.monitor == "monotonicity");
    CHECK(hard.k == 2);
    const Vector& prev = traj.states[traj.states.size() - 2];
    const Vector& last = traj.states.back();
    CHECK(last.front() < prev.front());
    CHECK(last.back() < prev.back());

    RunOptions keep_going;
    keep_going.stop_on_violation = false;
    const Trajectory full = run_to_quench(spec, 1e-13, keep_going);
    CHECK(full.summary.quenched);
}

TEST_CASE("monotone hypothesis") {
    const ProblemSpec spec = kawarada_spec(std::sqrt(2.0), 9, 0.1);
    const TridiagonalOperator a = assemble_A(spec.grid);
    const Vector zero(9, 0.0);
    SUBCASE("from rest") {
        CHECK(check_monotone_hypothesis(zero, 0.1 / 1.21, a, spec.f));
        // F(0) - tau0 A F(0) = 1 - tau0 A 1 >= 1.
        const Vector a1 = a.apply(Vector(9, 1.0));
        for (double v : a1) CHECK(1.0 - 0.1 / 1.21 * v >= 1.0 - 1e-15);
    }
    SUBCASE("tau0 = 0 reduces to the semidiscrete condition") {
        const Vector u = initial_vector(cosine_initial(spec.grid.half_width(), 0.2), spec.grid);
        CHECK(check_monotone_hypothesis(u, 0.0, a, spec.f));
    }
    SUBCASE("a spike violates it") {
        Vector spike(9, 0.0);
        spike[4] = 0.9;
        CHECK_FALSE(check_monotone_hypothesis(spike, 0.01, a, spec.f));
    }
}

TEST_CASE("sub-unity bound") {
    const Vector zero(3, 0.0);
    CHECK(sub_unity_bound(zero, 1, 0.1) == doctest::Approx(1.0 - 1.0 / 1.1));
    CHECK(sub_unity_bound(zero, 10, 0.1) == doctest::Approx(1.0 - std::pow(1.1, -10)));
    CHECK(sub_unity_bound(zero, 10, 0.1) == doctest::Approx(0.6145).epsilon(1e-4));
    const Vector u{0.1, 0.4, 0.2};
    CHECK(sub_unity_bound(u, 0, 0.3) == doctest::Approx(0.4));
}

TEST_CASE("quench-time upper bound") {
    const Nonlinearity f = kawarada();
    const Vector zero(5, 0.0), half(5, 0.5);
    CHECK(quench_time_upper_bound(f, zero, 0.1) == doctest::Approx(-1.0 + 0.5 / std::log(1.1)));
    CHECK(quench_time_upper_bound(f, zero, 0.1) == doctest::Approx(4.2457).epsilon(1e-4));
    CHECK(quench_time_upper_bound(f, zero, 1.0 - 1e-12) == doctest::Approx(-0.2787).epsilon(1e-3));
    CHECK(quench_time_upper_bound(f, half, 0.1) == doctest::Approx(-0.25 + 0.5 / std::log(1.1)));
    CHECK(quench_time_upper_bound(f, half, 0.1) == doctest::Approx(4.996).epsilon(1e-3));
    const ProblemSpec spec = kawarada_spec(1.0, 5, 0.1);
    CHECK(quench_time_upper_bound(spec) == quench_time_upper_bound(f, zero, 0.1));
}

TEST_CASE("run to quench on the standard domain") {
    const ProblemSpec spec = kawarada_spec(std::sqrt(2.0), 19, 0.05);
    const Trajectory traj = run_to_quench(spec, 1e-13);
    const RunSummary& s = traj.summary;
    CHECK(s.quenched);
    CHECK(s.termination == Termination::Quenched);
    CHECK(s.steps + 1 == static_cast<int>(traj.records.size()));
    CHECK(s.tau0 == doctest::Approx(0.05 / (1.05 * 1.05)));
    CHECK(s.quench_time <= s.bound_sigma_tau);
    CHECK(traj.records.back().max_u >= spec.quench_threshold);
    CHECK(traj.final_state == traj.states.back());
    // Symmetric data: the maximum sits on the center node x = 0 (index 9). The
    // first step from rest is spatially constant, so only ties are possible there.
    for (std::size_t k = 1; k < traj.states.size(); ++k) CHECK(traj.states[k][9] == traj.states[k][argmax(traj.states[k])]);
    for (std::size_t k = 2; k < traj.states.size(); ++k) CHECK(argmax(traj.states[k]) == 9);
    double sum = 0.0;
    for (std::size_t k = 1; k < traj.records.size(); ++k) {
        sum += traj.records[k].tau;
        CHECK(traj.records[k].tau <= traj.records[k - 1].tau);
        CHECK(traj.records[k].bound_margin >= -1e-13);
    }
    CHECK(sum == doctest::Approx(s.quench_time).epsilon(1e-14));
}

TEST_CASE("narrow domain settles to a steady state") {
    ProblemSpec spec = kawarada_spec(0.5, 19, 0.05);
    spec.max_steps = 200000;
    RunOptions opt;
    opt.stagnation_window = 50;
    opt.record_states = false;
    const Trajectory traj = run_to_quench(spec, 1e-13, opt);
    CHECK_FALSE(traj.summary.quenched);
    CHECK(traj.summary.termination == Termination::Steady);
    CHECK(traj.records.back().max_u < 0.5);
    CHECK(traj.states.size() == 2);
}

TEST_CASE("zero step budget") {
    ProblemSpec spec = kawarada_spec(1.0, 5, 0.1);
    spec.max_steps = 0;
    const Trajectory traj = run_to_quench(spec, 1e-13);
    CHECK(traj.records.size() == 1);
    CHECK(traj.states.size() == 1);
    CHECK(traj.summary.steps == 0);
    CHECK(traj.summary.termination == Termination::MaxSteps);
}

TEST_CASE("time budget") {
    const ProblemSpec spec = kawarada_spec(std::sqrt(2.0), 19, 0.05);
    RunOptions opt;
    opt.stop_time = 0.2;
    const Trajectory traj = run_to_quench(spec, 1e-13, opt);
    CHECK(traj.summary.termination == Termination::StopTime);
    CHECK(traj.records.back().t >= 0.2);
    CHECK(traj.records[traj.records.size() - 2].t < 0.2);
}

TEST_CASE("inadmissible problems are rejected") {
    ProblemSpec spec = kawarada_spec(1.0, 5, 0.1);
    spec.delta = 0.0;
    CHECK_THROWS_AS(run_to_quench(spec, 1e-13), Error);
}

TEST_CASE("trajectory CSV") {
    const ProblemSpec spec = kawarada_spec(1.0, 3, 0.1);
    RunOptions opt;
    opt.stop_time = 0.1;
    const Trajectory traj = run_to_quench(spec, 1e-13, opt);
    std::ostringstream os;
    write_trajectory_csv(os, traj);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "k,t,tau,max_U,residual,kappa_ratio,bound_margin,monotone_ok");
    std::getline(is, line);
    std::getline(is, line);
    // Row 1: tau0 = delta/(1+delta)^2 printed with 17 significant digits.
    char buf[64];
    std::snprintf(buf, sizeof buf, "1,%.17g,%.17g,", traj.records[1].t, traj.records[1].tau);
    CHECK(line.rfind(buf, 0) == 0);
    int rows = 1;
    while (std::getline(is, line)) ++rows;
    CHECK(rows + 1 == static_cast<int>(traj.records.size()));
}
