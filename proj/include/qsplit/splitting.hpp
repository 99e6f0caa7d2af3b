#pragma once

#include "qsplit/linalg.hpp"
#include "qsplit/model.hpp"

#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace qsplit {

/// Per-step diagnostics.
struct MonitorRecord {
    bool positivity_ok = true;
    bool monotone_ok = true;
    bool bound_ok = true;
    double residual = 0.0;        ///< weighted 2-norm defect of the raw scheme equation
    double kappa_ratio = 0.0;     ///< max(|A F(U)|, |A^2 F(U)|) / |A^2 U|, +inf when A^2 U = 0
    double lipschitz_level = 0.0; ///< max_n L(U_prev_n, U_n)
    double bound_margin = 0.0;    ///< sub_unity_bound(U0, k, delta) - max U
};

struct SplitState {
    int k = 0;
    double t = 0.0;
    double tau_prev = 1.0; ///< step that produced this state; 1 before the first step
    Vector u;
    MonitorRecord monitors;
};

struct StepOutcome {
    SplitState next;
    double tau_used = 0.0;
    int inner_iterations = 0;
    bool converged = false;
};

/// Singularity-contact threshold inside the nonlinear iteration.
inline constexpr double kContactThreshold = 1.0 - 1e-12;
/// Slack within which monitor failures are clamped and logged as soft.
inline constexpr double kMonitorSlack = 1e-13;

/// delta * min_i min{ (1 - g_i)/f(g_i), 1/f'(c_i) } with g the next-state
/// guess and c the current state.
double propose_tau(std::span<const double> u_current, std::span<const double> u_next_guess,
                   const Nonlinearity& f, double delta);

/// Solves U+ = (I - tau A)^{-1} U + tau F(U+) at a fixed tau by damped
/// fixed-point iteration starting from `guess`. Returns the iteration count.
/// Throws SingularityContact or Nonconvergence.
int solve_fixed_tau(const TridiagonalOperator& a, const Nonlinearity& f, std::span<const double> u,
                    double tau, Vector& guess, double tol, int max_inner);

/// U+ - U - tau A U+ - tau F(U+) + tau^2 A F(U+), weighted 2-norm.
double scheme_residual(const TridiagonalOperator& a, std::span<const double> weights, const Nonlinearity& f,
                       std::span<const double> u, std::span<const double> u_next, double tau);

/// One step of the implicit splitting scheme with the adaptive step rule:
/// alternates tau <- propose_tau(U, U+) with the fixed-tau solve until U+ and
/// tau agree to `tol`. Throws Nonconvergence when the iteration budget is
/// exhausted and SingularityContact when an iterate reaches 1 - 1e-12.
StepOutcome splitting_step(const SplitState& state, const TridiagonalOperator& a,
                           std::span<const double> weights, const Nonlinearity& f,
                           double delta, double tol, int max_inner);

/// A U0 + F(U0) - tau0 A F(U0) >= -1e-13 componentwise.
bool check_monotone_hypothesis(std::span<const double> u0, double tau0, const TridiagonalOperator& a,
                               const Nonlinearity& f);

/// 1 - (1 + delta)^{-k} (1 - max U0).
double sub_unity_bound(std::span<const double> u0, int k, double delta);

/// -(1 - m)/f(m) + int_0^1 1/f(1-s) ds / ln(1 + delta), m = min U0.
/// May be negative for large delta, in which case it carries no information.
double quench_time_upper_bound(const Nonlinearity& f, std::span<const double> u0, double delta);
double quench_time_upper_bound(const ProblemSpec& spec);

enum class Termination {
    Quenched,            ///< max U reached the quench threshold
    SingularityContact,  ///< nonlinear iterate touched 1 - 1e-12
    Steady,              ///< increments stagnated
    StopTime,            ///< simulated-time budget reached
    MaxSteps,
    StructureViolation,  ///< a monitor failed beyond its slack
};

const char* to_string(Termination t);

struct Violation {
    int k = 0;
    std::string monitor;
    std::string detail;
    bool hard = false;
};

struct RunSummary {
    bool quenched = false;
    double quench_time = 0.0; ///< accumulated sum of tau_j
    int steps = 0;
    double tau0 = 0.0;
    double bound_sigma_tau = 0.0;
    bool monotone_hypothesis = true;
    Termination termination = Termination::MaxSteps;
    std::vector<Violation> violations;
};

/// Per-step scalars; row k describes U^(k) and the step tau_{k-1} that produced it.
struct StepRecord {
    int k = 0;
    double t = 0.0;
    double tau = 0.0;
    double max_u = 0.0;
    double residual = 0.0;
    double kappa_ratio = 0.0;
    double bound_margin = 0.0;
    bool monotone_ok = true;
    bool positivity_ok = true;
    int inner_iterations = 0;
};

struct Trajectory {
    std::vector<StepRecord> records;
    std::vector<Vector> states;  ///< every U^(k) when recorded, else the last two
    Vector final_state;
    RunSummary summary;
};

struct RunOptions {
    double stop_time = std::numeric_limits<double>::infinity();
    double stagnation_tol = 1e-10; ///< steady when max |U^{k+1} - U^k| stays below this ...
    int stagnation_window = 0;     ///< ... for this many consecutive steps (0 disables)
    int max_inner = 500;
    bool record_states = true;
    bool stop_on_violation = true; ///< false keeps stepping past hard monitor failures (diagnostics)
};

/// Iterates splitting_step from U0 until quench, singularity contact,
/// stagnation, the time budget or max_steps, checking positivity, the
/// sub-unity bound, componentwise monotonicity and step decay after every
/// accepted step. A hard monitor failure stops the run with
/// Termination::StructureViolation unless stop_on_violation is off; the
/// offending step is in the violation log either way.
Trajectory run_to_quench(const ProblemSpec& spec, double tol, const RunOptions& options = {});

/// CSV header: k,t,tau,max_U,residual,kappa_ratio,bound_margin,monotone_ok
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

} // namespace qsplit
