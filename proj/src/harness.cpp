#include "qsplit/harness.hpp"

#include "qsplit/error.hpp"
#include "qsplit/format.hpp"
#include "qsplit/semidiscrete.hpp"
#include "qsplit/validation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace qsplit {

Grid make_grid(const ProblemConfig& cfg) {
    if (cfg.grid_kind == "uniform") {
        return build_uniform(cfg.a, cfg.n);
    }
    if (cfg.grid_kind == "graded") {
        return build_graded(cfg.a, cfg.n, cfg.grading);
    }
    fail(ErrorCode::InvalidArgument, "unknown grid kind '" + cfg.grid_kind + "' (expected uniform or graded)");
}

ProblemSpec make_spec(const ProblemConfig& cfg) {
    InitialCondition u0;
    if (cfg.initial == "zero") {
        u0 = zero_initial(cfg.a);
    } else if (cfg.initial == "cosine") {
        u0 = cosine_initial(cfg.a, cfg.initial_amplitude);
    } else {
        fail(ErrorCode::InvalidArgument, "unknown initial condition '" + cfg.initial + "' (expected zero or cosine)");
    }
    ProblemSpec spec{make_grid(cfg), nonlinearity_by_label(cfg.nonlinearity), std::move(u0), cfg.delta,
                     cfg.quench_threshold, cfg.max_steps};
    validate_problem(spec);
    return spec;
}

void fill_orders(OrderReport& report) {
    report.observed_orders.clear();
    report.summary_order.reset();
    bool degenerate = report.levels.size() < 2;
    for (std::size_t i = 0; i + 1 < report.levels.size(); ++i) {
        const OrderLevel& c = report.levels[i];
        const OrderLevel& f = report.levels[i + 1];
        if (c.resolution == f.resolution || !(c.error > 0.0) || !(f.error > 0.0)) {
            report.observed_orders.push_back(std::nullopt);
            degenerate = true;
            continue;
        }
        report.observed_orders.push_back(std::log(c.error / f.error) / std::log(c.resolution / f.resolution));
    }
    if (degenerate) {
        return;
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double m = static_cast<double>(report.levels.size());
    for (const OrderLevel& l : report.levels) {
        const double x = std::log(l.resolution);
        const double y = std::log(l.error);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    report.summary_order = (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

namespace {

Vector oracle_state_at(const ProblemSpec& spec, double t_star, OracleConfig oc) {
    oc.stop_time = t_star;
    oc.quench_threshold = spec.quench_threshold;
    oc.checkpoint_stride = 1 << 30; // only the endpoints are needed
    OracleTrajectory traj = integrate_oracle(spec, oc);
    if (traj.quenched) {
        fail(ErrorCode::InvalidArgument, "t_star = " + fmt17(t_star) + " lies beyond the oracle quench estimate " +
                                             fmt17(traj.quench_time_estimate.value_or(traj.times.back())));
    }
    return traj.states.back();
}

struct SplitAtTime {
    Vector u;
    int steps = 0;
    int hard_violations = 0;
};

SplitAtTime split_state_at(const ProblemSpec& spec, double t_star, double tol) {
    RunOptions ro;
    ro.stop_time = t_star;
    ro.record_states = false;
    ro.stop_on_violation = false;
    Trajectory traj = run_to_quench(spec, tol, ro);
    if (traj.summary.quenched || traj.summary.termination != Termination::StopTime) {
        fail(ErrorCode::InvalidArgument, "splitting run stopped (" + std::string(to_string(traj.summary.termination)) +
                                             ") before t_star = " + fmt17(t_star));
    }
    SplitAtTime out;
    out.steps = traj.summary.steps;
    for (const Violation& v : traj.summary.violations) {
        out.hard_violations += v.hard ? 1 : 0;
    }
    // states holds the last two accepted iterates; they bracket t_star.
    const std::size_t m = traj.records.size();
    if (traj.records.back().t == t_star || m < 2) {
        out.u = traj.final_state;
        return out;
    }
    const double t0 = traj.records[m - 2].t;
    const double t1 = traj.records[m - 1].t;
    const Vector& u0 = traj.states[traj.states.size() - 2];
    const Vector& u1 = traj.states.back();
    const double s = (t_star - t0) / (t1 - t0);
    out.u.resize(u1.size());
    for (std::size_t i = 0; i < u1.size(); ++i) {
        out.u[i] = (1.0 - s) * u0[i] + s * u1[i];
    }
    return out;
}

Vector difference(std::span<const double> x, std::span<const double> y) {
    Vector d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        d[i] = x[i] - y[i];
    }
    return d;
}

} // namespace

OrderReport converge_time(const ProblemSpec& spec, double t_star, int levels, const TimeStudyOptions& options) {
    require(levels >= 3, "converge_time: at least 3 levels are needed for an order estimate");
    require(std::isfinite(t_star) && t_star > 0.0, "converge_time: t_star must be positive");
    validate_problem(spec);
    OracleConfig oc;
    oc.dt_safety = options.dt_safety;
    const Vector reference = oracle_state_at(spec, t_star, oc);

    OrderReport report;
    report.kind = "time";
    report.t_star = t_star;
    for (int l = 0; l < levels; ++l) {
        ProblemSpec s = spec;
        s.delta = std::ldexp(spec.delta, -l);
        SplitAtTime split = split_state_at(s, t_star, options.tol);
        report.levels.push_back(OrderLevel{s.delta, weighted_norm2(difference(split.u, reference), s.grid.weights()),
                                           s.grid.interior_count(), split.steps, split.hard_violations});
    }
    fill_orders(report);
    return report;
}

OrderReport converge_space(const ProblemConfig& cfg, double t_star, const SpaceStudyOptions& options) {
    require(options.n_levels.size() >= 3, "converge_space: at least 3 levels are needed for an order estimate");
    require(std::isfinite(t_star) && t_star > 0.0, "converge_space: t_star must be positive");
    require(options.reference_n >= 1, "converge_space: reference_n must be positive");
    for (int n : options.n_levels) {
        require(n >= 1 && (options.reference_n + 1) % (n + 1) == 0,
                "converge_space: reference_n + 1 = " + std::to_string(options.reference_n + 1) +
                    " is not a multiple of N + 1 = " + std::to_string(n + 1));
    }

    ProblemConfig ref_cfg = cfg;
    ref_cfg.n = options.reference_n;
    const ProblemSpec ref_spec = make_spec(ref_cfg);
    OracleConfig oc;
    oc.method = options.oracle;
    oc.dt_safety = options.dt_safety;
    oc.implicit_dt = options.implicit_dt;
    const Vector reference = oracle_state_at(ref_spec, t_star, oc);

    OrderReport report;
    report.kind = "space";
    report.t_star = t_star;
    for (int n : options.n_levels) {
        ProblemConfig c = cfg;
        c.n = n;
        c.delta = options.delta;
        c.max_steps = std::max(c.max_steps, 100'000'000);
        const ProblemSpec spec = make_spec(c);
        SplitAtTime split = split_state_at(spec, t_star, options.tol);
        const int stride = (options.reference_n + 1) / (n + 1);
        Vector restricted(n);
        for (int i = 1; i <= n; ++i) {
            restricted[i - 1] = reference[static_cast<std::size_t>(i * stride - 1)];
        }
        report.levels.push_back(OrderLevel{spec.grid.max_spacing(),
                                           weighted_norm2(difference(split.u, restricted), spec.grid.weights()), n,
                                           split.steps, split.hard_violations});
    }
    fill_orders(report);
    return report;
}

const char* to_string(Outcome o) {
    switch (o) {
    case Outcome::Quench: return "quench";
    case Outcome::Steady: return "steady";
    case Outcome::Undecided: return "undecided";
    }
    return "unknown";
}

CriticalEvaluation classify_half_width(const ProblemConfig& cfg, double a, int n, const CriticalOptions& options) {
    ProblemConfig c = cfg;
    c.a = a;
    c.n = n;
    c.delta = options.delta;
    c.max_steps = options.max_steps;
    const ProblemSpec spec = make_spec(c);
    RunOptions ro;
    ro.stop_time = options.budget_time;
    ro.stagnation_tol = options.stagnation_tol;
    ro.stagnation_window = options.stagnation_window;
    ro.record_states = false;
    ro.stop_on_violation = false;
    const Trajectory traj = run_to_quench(spec, options.tol, ro);

    CriticalEvaluation e;
    e.a = a;
    e.t = traj.summary.quench_time;
    e.steps = traj.summary.steps;
    switch (traj.summary.termination) {
    case Termination::Quenched:
    case Termination::SingularityContact: e.outcome = Outcome::Quench; break;
    case Termination::Steady: e.outcome = Outcome::Steady; break;
    default: e.outcome = Outcome::Undecided; break;
    }
    return e;
}

double find_critical_a(const ProblemConfig& cfg, double a_lo, double a_hi, int n, double tol_a,
                       const CriticalOptions& options, CriticalReport* report) {
    require(a_lo > 0.0 && a_hi > a_lo, "find_critical_a: bracket must satisfy 0 < a_lo < a_hi");
    require(tol_a > 0.0, "find_critical_a: tol_a must be positive");
    require(options.budget_time > 0.0, "find_critical_a: budget_time must be positive");
    CriticalReport local;
    CriticalReport& r = report ? *report : local;
    r = CriticalReport{};
    r.lo = a_lo;
    r.hi = a_hi;
    if (tol_a >= a_hi - a_lo) {
        r.a_star = 0.5 * (a_lo + a_hi);
        return r.a_star;
    }

    auto evaluate = [&](double a) {
        CriticalEvaluation e = classify_half_width(cfg, a, n, options);
        r.evaluations.push_back(e);
        if (e.outcome == Outcome::Undecided) {
            fail(ErrorCode::Inconclusive, "find_critical_a: run at a = " + fmt17(a) +
                                              " neither quenched nor stagnated within budget_time " +
                                              fmt17(options.budget_time));
        }
        return e.outcome;
    };

    const Outcome at_lo = evaluate(a_lo);
    const Outcome at_hi = evaluate(a_hi);
    if (at_lo != Outcome::Steady || at_hi != Outcome::Quench) {
        fail(ErrorCode::InvalidBracket, std::string("find_critical_a: bracket does not straddle the transition (a_lo ") +
                                            to_string(at_lo) + ", a_hi " + to_string(at_hi) + ")");
    }
    double lo = a_lo;
    double hi = a_hi;
    while (hi - lo > tol_a) {
        const double mid = 0.5 * (lo + hi);
        if (evaluate(mid) == Outcome::Steady) {
            lo = mid;
        } else {
            hi = mid;
        }
        r.lo = lo;
        r.hi = hi;
    }
    r.a_star = 0.5 * (lo + hi);
    return r.a_star;
}

bool ValidationReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.pass; });
}

std::vector<Vector> fixed_random_vectors(int count, int n, unsigned long long seed) {
    std::mt19937_64 gen(seed);
    std::vector<Vector> out(static_cast<std::size_t>(count), Vector(static_cast<std::size_t>(n)));
    for (Vector& v : out) {
        for (double& x : v) {
            x = std::ldexp(static_cast<double>(gen() >> 11), -52) - 1.0;
        }
    }
    return out;
}

namespace {

constexpr double kContractionSlack = 1e-10;
constexpr double kDefinitionTolerance = 1e-6;

} // namespace

void validate_operator(const TridiagonalOperator& a, std::span<const double> weights, const std::string& label,
                       const ValidationOptions& options, ValidationReport& report) {
    const int n = a.size();
    auto add = [&](const std::string& name, double margin, const std::string& detail) {
        report.checks.push_back(ValidationCheck{label, name, margin >= 0.0, margin, detail});
    };

    double sign_margin = std::numeric_limits<double>::infinity();
    for (double d : a.diag()) sign_margin = std::min(sign_margin, -d);
    for (double s : a.sub()) sign_margin = std::min(sign_margin, s);
    for (double s : a.sup()) sign_margin = std::min(sign_margin, s);
    add("sign_pattern", sign_margin,
        "min of -diag, sub, sup (M-matrix sign pattern)");

    const Vector rows = a.row_sums();
    double row_margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        if (i == 0 || i == n - 1) {
            row_margin = std::min(row_margin, -rows[i]);
        } else {
            const double scale = std::max(1.0, std::abs(a.diag()[i]));
            row_margin = std::min(row_margin, 1e-13 * scale - std::abs(rows[i]));
        }
    }
    add("row_sums", row_margin, "boundary rows < 0, interior rows 0 within 1e-13 relative");

    const double mu = log_norm_2(a, weights);
    add("log_norm_negative", -mu, "mu = " + fmt17(mu));

    const auto vecs = fixed_random_vectors(options.random_vectors, n, 0x5eed0000ULL + static_cast<unsigned>(n));

    double res_margin = std::numeric_limits<double>::infinity();
    for (double tau : options.taus) {
        const double factor = 1.0 / (1.0 - tau * mu);
        for (const Vector& v : vecs) {
            const double nv = weighted_norm2(v, weights);
            const double nr = weighted_norm2(solve_shifted(a, tau, v), weights);
            res_margin = std::min(res_margin, (factor * nv - nr) / nv);
        }
    }
    add("resolvent_contraction", res_margin + kContractionSlack,
        "min over tau, v of ((1 - tau mu)^-1 |v| - |(I - tau A)^-1 v|) / |v|, slack 1e-10");

    double nonneg = std::numeric_limits<double>::infinity();
    double dominate = std::numeric_limits<double>::infinity();
    for (double tau : options.taus) {
        nonneg = std::min(nonneg, resolvent_min_entry(a, tau));
        dominate = std::min(dominate, resolvent_constant_margin(a, tau, 1.0));
    }
    add("resolvent_nonnegative", nonneg + kNonnegativeSlack, "min entry of (I - tau A)^-1, slack 1e-13");
    add("resolvent_dominates_constant", dominate + kNonnegativeSlack,
        "min_i ((I - tau A)^-1 1)_i - 1, slack 1e-13");

    if (n > kDenseExpmMaxSize) {
        return;
    }
    const DenseMatrix dense = a.to_dense();
    const double probe = log_norm_limit_probe(dense, weights, probe_trial_vectors(dense, weights),
                                              probe_t_sequence(dense));
    add("log_norm_definition", kDefinitionTolerance - std::abs(probe - mu),
        "|limit quotient - eigenvalue route| = " + fmt17(std::abs(probe - mu)));

    double exp_margin = std::numeric_limits<double>::infinity();
    double exp_min = std::numeric_limits<double>::infinity();
    for (double t : options.exp_times) {
        const DenseMatrix e = dense_expm(dense, t);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                exp_min = std::min(exp_min, e(i, j));
            }
        }
        const double bound = std::exp(t * mu);
        for (const Vector& v : vecs) {
            const double nv = weighted_norm2(v, weights);
            exp_margin = std::min(exp_margin, (bound * nv - weighted_norm2(e.multiply(v), weights)) / nv);
        }
    }
    add("exp_contraction", exp_margin + kContractionSlack,
        "min over t, v of (e^{t mu} |v| - |exp(tA) v|) / |v|, slack 1e-10");
    add("exp_positive", exp_min > 0.0 ? exp_min : -1.0, "min entry of exp(tA) = " + fmt17(exp_min));
}

ValidationReport validate_linalg(const ValidationOptions& options) {
    require(!options.n_list.empty(), "validate_linalg: empty N list");
    ValidationReport report;
    auto run = [&](const Grid& g, const std::string& label) {
        validate_operator(assemble_A(g), g.weights(), label, options, report);
    };
    for (int n : options.n_list) {
        run(build_uniform(options.half_width, n), "uniform N=" + std::to_string(n));
    }
    for (double g : options.gradings) {
        for (int n : options.n_list) {
            run(build_graded(options.half_width, n, g), "graded g=" + fmt17(g) + " N=" + std::to_string(n));
        }
    }
    return report;
}

} // namespace qsplit
