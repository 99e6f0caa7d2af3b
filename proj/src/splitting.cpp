#include "qsplit/splitting.hpp"

#include "qsplit/error.hpp"
#include "qsplit/format.hpp"

#include <algorithm>
#include <cmath>

namespace qsplit {

namespace {

double max_of(std::span<const double> v) { return *std::max_element(v.begin(), v.end()); }
double min_of(std::span<const double> v) { return *std::min_element(v.begin(), v.end()); }

void require_sub_unity(std::span<const double> v, const char* what) {
    for (double x : v) {
        require(std::isfinite(x) && x < 1.0, std::string(what) + ": components must be below 1");
    }
}

double kappa_ratio(const TridiagonalOperator& a, std::span<const double> weights, const Nonlinearity& f,
                   std::span<const double> u) {
    const Vector fu = apply_f(f, u);
    const Vector afu = a.apply(fu);
    const Vector a2fu = a.apply(afu);
    const Vector a2u = a.apply(a.apply(u));
    const double denom = weighted_norm2(a2u, weights);
    const double numer = std::max(weighted_norm2(afu, weights), weighted_norm2(a2fu, weights));
    if (denom == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return numer / denom;
}

} // namespace

const char* to_string(Termination t) {
    switch (t) {
    case Termination::Quenched: return "quenched";
    case Termination::SingularityContact: return "singularity_contact";
    case Termination::Steady: return "steady";
    case Termination::StopTime: return "stop_time";
    case Termination::MaxSteps: return "max_steps";
    case Termination::StructureViolation: return "structure_violation";
    }
    return "unknown";
}

double propose_tau(std::span<const double> u_current, std::span<const double> u_next_guess,
                   const Nonlinearity& f, double delta) {
    require(delta > 0.0 && delta < 1.0, "propose_tau: delta must lie in (0,1)");
    require(u_current.size() == u_next_guess.size() && !u_current.empty(), "propose_tau: dimension mismatch");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < u_current.size(); ++i) {
        const double g = u_next_guess[i];
        const double c = u_current[i];
        require(std::isfinite(g) && std::isfinite(c) && g < 1.0 && c < 1.0,
                "propose_tau: components must lie below 1");
        best = std::min(best, std::min((1.0 - g) / f.eval(g), 1.0 / f.deriv(c)));
    }
    return delta * best;
}

int solve_fixed_tau(const TridiagonalOperator& a, const Nonlinearity& f, std::span<const double> u,
                    double tau, Vector& guess, double tol, int max_inner) {
    require(tol > 0.0, "solve_fixed_tau: tol must be positive");
    const Vector b = solve_shifted(a, tau, u);
    if (tau == 0.0) {
        guess = b;
        return 1;
    }
    const std::size_t n = b.size();
    double omega = 1.0;
    double prev = std::numeric_limits<double>::infinity();
    Vector next(n);
    for (int it = 1; it <= max_inner; ++it) {
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double target = b[i] + tau * f.eval(guess[i]);
            next[i] = guess[i] + omega * (target - guess[i]);
            if (!(next[i] < kContactThreshold)) {
                fail(ErrorCode::SingularityContact, "nonlinear iterate reached 1 - 1e-12 at node " +
                                                        std::to_string(i + 1));
            }
            change = std::max(change, std::abs(next[i] - guess[i]));
        }
        guess.swap(next);
        if (change <= tol) {
            return it;
        }
        if (change > prev) {
            omega *= 0.5;
        }
        prev = change;
    }
    fail(ErrorCode::Nonconvergence, "fixed-point iteration did not converge within the inner budget");
}

double scheme_residual(const TridiagonalOperator& a, std::span<const double> weights, const Nonlinearity& f,
                       std::span<const double> u, std::span<const double> u_next, double tau) {
    const Vector fu = apply_f(f, u_next);
    const Vector au = a.apply(u_next);
    const Vector afu = a.apply(fu);
    Vector r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        r[i] = u_next[i] - u[i] - tau * au[i] - tau * fu[i] + tau * tau * afu[i];
    }
    return weighted_norm2(r, weights);
}

StepOutcome splitting_step(const SplitState& state, const TridiagonalOperator& a,
                           std::span<const double> weights, const Nonlinearity& f,
                           double delta, double tol, int max_inner) {
    require(tol > 0.0, "splitting_step: tol must be positive");
    require(max_inner >= 1, "splitting_step: max_inner must be positive");
    require(static_cast<int>(state.u.size()) == a.size(), "splitting_step: state dimension mismatch");
    require_sub_unity(state.u, "splitting_step");

    const Vector& u = state.u;
    Vector next = u;
    double tau = propose_tau(u, next, f, delta);
    int used = 0;
    bool converged = false;
    while (used < max_inner) {
        const int sweeps = solve_fixed_tau(a, f, u, tau, next, tol, max_inner - used);
        used += sweeps;
        const double tau_new = propose_tau(u, next, f, delta);
        // Near quench tau inherits eps/(1 - U+) relative noise from U+; a
        // guess that already solves the fixed-tau problem is then the answer.
        const bool settled = std::abs(tau_new - tau) <= tol * tau_new || (used > sweeps && sweeps == 1);
        tau = tau_new;
        if (settled) {
            // Bring U+ in line with the tau actually reported.
            used += solve_fixed_tau(a, f, u, tau, next, tol, std::max(1, max_inner - used));
            converged = true;
            break;
        }
    }
    if (!converged) {
        fail(ErrorCode::Nonconvergence, "splitting_step: step-size/state coupling did not converge");
    }

    StepOutcome out;
    out.tau_used = tau;
    out.inner_iterations = used;
    out.converged = true;
    out.next.k = state.k + 1;
    out.next.t = state.t + tau;
    out.next.tau_prev = tau;
    out.next.u = std::move(next);

    MonitorRecord& m = out.next.monitors;
    m.residual = scheme_residual(a, weights, f, u, out.next.u, tau);
    m.kappa_ratio = kappa_ratio(a, weights, f, out.next.u);
    double lip = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        lip = std::max(lip, f.lipschitz(u[i], out.next.u[i]));
    }
    m.lipschitz_level = lip;
    m.positivity_ok = min_of(out.next.u) >= -kMonitorSlack;
    bool mono = true;
    for (std::size_t i = 0; i < u.size(); ++i) {
        mono = mono && out.next.u[i] - u[i] >= -kMonitorSlack;
    }
    m.monotone_ok = mono;
    return out;
}

bool check_monotone_hypothesis(std::span<const double> u0, double tau0, const TridiagonalOperator& a,
                               const Nonlinearity& f) {
    require_sub_unity(u0, "check_monotone_hypothesis");
    const Vector au = a.apply(u0);
    const Vector fu = apply_f(f, u0);
    const Vector afu = a.apply(fu);
    for (std::size_t i = 0; i < u0.size(); ++i) {
        if (!(au[i] + fu[i] - tau0 * afu[i] >= -kNonnegativeSlack)) {
            return false;
        }
    }
    return true;
}

double sub_unity_bound(std::span<const double> u0, int k, double delta) {
    require(k >= 0, "sub_unity_bound: k must be nonnegative");
    require(delta > 0.0 && delta < 1.0, "sub_unity_bound: delta must lie in (0,1)");
    return 1.0 - std::pow(1.0 + delta, -k) * (1.0 - max_of(u0));
}

double quench_time_upper_bound(const Nonlinearity& f, std::span<const double> u0, double delta) {
    require(static_cast<bool>(f.inv_f_one_minus_integral), "quench_time_upper_bound: nonlinearity lacks the integral hook");
    require(delta > 0.0 && delta < 1.0, "quench_time_upper_bound: delta must lie in (0,1)");
    const double m = min_of(u0);
    return -(1.0 - m) / f.eval(m) + f.inv_f_one_minus_integral(1.0) / std::log1p(delta);
}

double quench_time_upper_bound(const ProblemSpec& spec) {
    return quench_time_upper_bound(spec.f, initial_vector(spec), spec.delta);
}

Trajectory run_to_quench(const ProblemSpec& spec, double tol, const RunOptions& options) {
    validate_problem(spec);
    require(tol > 0.0, "run_to_quench: tol must be positive");
    auto problems = check_admissible(spec.f, spec.u0, spec.grid);
    if (!problems.empty()) {
        fail(ErrorCode::InvalidArgument, "run_to_quench: inadmissible data: " + problems.front());
    }

    const TridiagonalOperator a = assemble_A(spec.grid);
    auto weights = spec.grid.weights();
    const Vector u0 = initial_vector(spec);

    Trajectory traj;
    RunSummary& summary = traj.summary;
    summary.bound_sigma_tau = quench_time_upper_bound(spec.f, u0, spec.delta);

    SplitState state;
    state.u = u0;
    state.monitors.kappa_ratio = kappa_ratio(a, weights, spec.f, u0);
    state.monitors.bound_margin = 0.0;
    traj.records.push_back(StepRecord{0, 0.0, state.tau_prev, max_of(u0), 0.0, state.monitors.kappa_ratio,
                                      0.0, true, true, 0});
    traj.states.push_back(u0);

    int quiet_steps = 0;
    summary.termination = Termination::MaxSteps;
    bool stopped = false;
    if (max_of(u0) >= spec.quench_threshold) {
        summary.quenched = true;
        summary.termination = Termination::Quenched;
        stopped = true;
    }

    while (!stopped && state.k < spec.max_steps) {
        if (state.t >= options.stop_time) {
            summary.termination = Termination::StopTime;
            stopped = true;
            break;
        }
        StepOutcome step;
        try {
            step = splitting_step(state, a, weights, spec.f, spec.delta, tol, options.max_inner);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::SingularityContact) {
                throw;
            }
            summary.quenched = true;
            summary.termination = Termination::SingularityContact;
            stopped = true;
            break;
        }
        SplitState next = std::move(step.next);
        const int k = next.k;
        if (state.k == 0) {
            summary.tau0 = step.tau_used;
            summary.monotone_hypothesis = check_monotone_hypothesis(u0, step.tau_used, a, spec.f);
        }

        bool hard = false;
        auto log = [&](const std::string& monitor, const std::string& detail, bool is_hard) {
            summary.violations.push_back(Violation{k, monitor, detail, is_hard});
            hard = hard || is_hard;
        };

        MonitorRecord& m = next.monitors;
        m.positivity_ok = true;
        for (std::size_t i = 0; i < next.u.size(); ++i) {
            if (next.u[i] < 0.0) {
                if (next.u[i] >= -kMonitorSlack) {
                    log("positivity", "clamped U_" + std::to_string(i + 1) + " = " + fmt17(next.u[i]), false);
                    next.u[i] = 0.0;
                } else {
                    m.positivity_ok = false;
                    log("positivity", "U_" + std::to_string(i + 1) + " = " + fmt17(next.u[i]), true);
                }
            }
        }
        m.monotone_ok = true;
        for (std::size_t i = 0; i < next.u.size(); ++i) {
            const double d = next.u[i] - state.u[i];
            if (d < 0.0) {
                if (d >= -kMonitorSlack) {
                    log("monotonicity", "clamped decrease at node " + std::to_string(i + 1) + ": " + fmt17(d), false);
                    next.u[i] = state.u[i];
                } else {
                    m.monotone_ok = false;
                    log("monotonicity", "decrease at node " + std::to_string(i + 1) + ": " + fmt17(d),
                        summary.monotone_hypothesis);
                }
            }
        }
        const double umax = max_of(next.u);
        m.bound_margin = sub_unity_bound(u0, k, spec.delta) - umax;
        m.bound_ok = m.bound_margin >= -kMonitorSlack;
        if (m.bound_margin < 0.0) {
            log("sub_unity_bound", "margin " + fmt17(m.bound_margin), !m.bound_ok);
        }
        if (step.tau_used > state.tau_prev * (1.0 + 1e-12)) {
            log("step_decay", "tau " + fmt17(step.tau_used) + " exceeds previous " + fmt17(state.tau_prev), true);
        }
        if (m.residual > 10.0 * tol) {
            log("residual", "defect " + fmt17(m.residual) + " above 10*tol", false);
        }

        double increment = 0.0;
        for (std::size_t i = 0; i < next.u.size(); ++i) {
            increment = std::max(increment, std::abs(next.u[i] - state.u[i]));
        }

        traj.records.push_back(StepRecord{k, next.t, step.tau_used, umax, m.residual, m.kappa_ratio,
                                          m.bound_margin, m.monotone_ok, m.positivity_ok, step.inner_iterations});
        traj.states.push_back(next.u);
        if (!options.record_states && traj.states.size() > 2) {
            traj.states.erase(traj.states.begin());
        }
        state = std::move(next);

        if (hard && options.stop_on_violation) {
            summary.termination = Termination::StructureViolation;
            stopped = true;
            break;
        }
        if (umax >= spec.quench_threshold) {
            summary.quenched = true;
            summary.termination = Termination::Quenched;
            stopped = true;
            break;
        }
        if (options.stagnation_window > 0) {
            quiet_steps = increment < options.stagnation_tol ? quiet_steps + 1 : 0;
            if (quiet_steps >= options.stagnation_window) {
                summary.termination = Termination::Steady;
                stopped = true;
                break;
            }
        }
    }
    if (!stopped && state.t >= options.stop_time) {
        summary.termination = Termination::StopTime;
    }

    summary.steps = state.k;
    summary.quench_time = state.t;
    traj.final_state = state.u;
    return traj;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "k,t,tau,max_U,residual,kappa_ratio,bound_margin,monotone_ok\n";
    for (const StepRecord& r : traj.records) {
        os << r.k << ',' << fmt17(r.t) << ',' << fmt17(r.tau) << ',' << fmt17(r.max_u) << ','
           << fmt17(r.residual) << ',' << fmt17(r.kappa_ratio) << ',' << fmt17(r.bound_margin) << ','
           << (r.monotone_ok ? 1 : 0) << '\n';
    }
}

} // namespace qsplit
