#include "qsplit/semidiscrete.hpp"

#include "qsplit/error.hpp"
#include "qsplit/format.hpp"

#include <algorithm>
#include <cmath>

namespace qsplit {

namespace {

double max_of(std::span<const double> v) { return *std::max_element(v.begin(), v.end()); }

bool inside_unit(std::span<const double> v) {
    for (double x : v) {
        if (!(x < 1.0) || !std::isfinite(x)) {
            return false;
        }
    }
    return true;
}

Vector hermite(double t0, std::span<const double> u0, std::span<const double> d0,
               double t1, std::span<const double> u1, std::span<const double> d1, double t) {
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    Vector out(u0.size());
    for (std::size_t n = 0; n < u0.size(); ++n) {
        out[n] = h00 * u0[n] + h10 * h * d0[n] + h01 * u1[n] + h11 * h * d1[n];
    }
    return out;
}

// Solves y - c (A y + F(y)) = rhs by Newton's method; y holds the start guess.
void implicit_stage(const TridiagonalOperator& a, const Nonlinearity& f, double c, std::span<const double> rhs,
                    Vector& y) {
    const std::size_t n = y.size();
    auto sub = a.sub();
    auto diag = a.diag();
    auto sup = a.sup();
    Vector r(n), d(n), cp(n), dx(n);
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 50; ++it) {
        if (!inside_unit(y)) {
            fail(ErrorCode::IntegrationFailure, "integrate_oracle: implicit stage left [0, 1)");
        }
        const Vector g = semidiscrete_rate(a, f, y);
        for (std::size_t i = 0; i < n; ++i) {
            r[i] = rhs[i] - (y[i] - c * g[i]);
            d[i] = 1.0 - c * (diag[i] + f.deriv(y[i]));
        }
        // Thomas on J dx = r with J = I - c (A + diag f'(y)).
        double beta = d[0];
        dx[0] = r[0] / beta;
        for (std::size_t i = 1; i < n; ++i) {
            cp[i - 1] = -c * sup[i - 1] / beta;
            beta = d[i] + c * sub[i - 1] * cp[i - 1];
            dx[i] = (r[i] + c * sub[i - 1] * dx[i - 1]) / beta;
        }
        for (std::size_t i = n - 1; i-- > 0;) {
            dx[i] -= cp[i] * dx[i + 1];
        }
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            y[i] += dx[i];
            change = std::max(change, std::abs(dx[i]));
        }
        // Stiff stages put a rounding floor under dx; stop once Newton stalls there.
        if (change <= 1e-14 || (change <= 1e-10 && change >= 0.5 * prev)) {
            return;
        }
        prev = change;
    }
    fail(ErrorCode::IntegrationFailure, "integrate_oracle: Newton iteration of an implicit stage did not converge");
}

OracleTrajectory integrate_sdirk(const ProblemSpec& spec, const OracleConfig& cfg) {
    require(cfg.implicit_dt > 0.0, "integrate_oracle: implicit_dt must be positive");
    require(std::isfinite(cfg.stop_time), "integrate_oracle: the Sdirk2 method needs a finite stop_time");
    const TridiagonalOperator a = assemble_A(spec.grid);
    const double gamma = 1.0 - 1.0 / std::sqrt(2.0);

    OracleTrajectory traj;
    traj.quench_threshold = cfg.quench_threshold;
    Vector u = initial_vector(spec);
    traj.times.push_back(0.0);
    traj.states.push_back(u);
    traj.rates.push_back(semidiscrete_rate(a, spec.f, u));

    const long long steps = static_cast<long long>(std::ceil(cfg.stop_time / cfg.implicit_dt - 1e-9));
    require(steps <= cfg.max_steps, "integrate_oracle: stop_time / implicit_dt exceeds max_steps");
    const double dt = cfg.stop_time / static_cast<double>(steps);
    const std::size_t n = u.size();
    Vector y1, y2, rhs(n);
    long long since_store = 0;
    for (long long k = 1; k <= steps; ++k) {
        y1 = u;
        implicit_stage(a, spec.f, gamma * dt, u, y1);
        const Vector g1 = semidiscrete_rate(a, spec.f, y1);
        for (std::size_t i = 0; i < n; ++i) {
            rhs[i] = u[i] + (1.0 - gamma) * dt * g1[i];
        }
        y2 = y1;
        implicit_stage(a, spec.f, gamma * dt, rhs, y2);
        for (double v : y2) {
            if (std::isnan(v) || v < 0.0) {
                fail(ErrorCode::IntegrationFailure, "integrate_oracle: state left [0, 1)");
            }
        }
        u = y2;
        ++traj.steps;
        const double t = k == steps ? cfg.stop_time : static_cast<double>(k) * dt;
        const bool quench = max_of(u) >= cfg.quench_threshold;
        if (quench || ++since_store >= cfg.checkpoint_stride || k == steps) {
            traj.times.push_back(t);
            traj.states.push_back(u);
            traj.rates.push_back(semidiscrete_rate(a, spec.f, u));
            since_store = 0;
        }
        if (quench) {
            // Reported at the crossing step; this method keeps no refinement.
            traj.quenched = true;
            traj.quench_time_estimate = t;
            break;
        }
    }
    return traj;
}

} // namespace

Vector semidiscrete_rate(const TridiagonalOperator& a, const Nonlinearity& f, std::span<const double> u) {
    Vector out = a.apply(u);
    for (std::size_t n = 0; n < u.size(); ++n) {
        out[n] += f.eval(u[n]);
    }
    return out;
}

OracleTrajectory integrate_oracle(const ProblemSpec& spec, const OracleConfig& cfg) {
    validate_problem(spec);
    require(cfg.dt_safety > 0.0 && cfg.dt_safety <= 1.0, "integrate_oracle: dt_safety must lie in (0,1]");
    require(cfg.stop_time > 0.0, "integrate_oracle: stop_time must be positive");
    require(cfg.quench_threshold > 0.0 && cfg.quench_threshold < 1.0,
            "integrate_oracle: quench_threshold must lie in (0,1)");
    require(cfg.checkpoint_stride >= 1, "integrate_oracle: checkpoint_stride must be positive");
    auto problems = check_admissible(spec.f, spec.u0, spec.grid);
    if (!problems.empty()) {
        fail(ErrorCode::InvalidArgument, "integrate_oracle: inadmissible data: " + problems.front());
    }
    if (cfg.method == OracleMethod::Sdirk2) {
        return integrate_sdirk(spec, cfg);
    }

    const TridiagonalOperator a = assemble_A(spec.grid);
    auto h = spec.grid.spacings();
    double hh = std::numeric_limits<double>::infinity();
    for (std::size_t n = 1; n < h.size(); ++n) {
        hh = std::min(hh, h[n - 1] * h[n]);
    }
    double dt = cfg.dt_safety * hh / 4.0;
    const double dt_floor = dt * 1e-12;

    OracleTrajectory traj;
    traj.quench_threshold = cfg.quench_threshold;
    Vector u = initial_vector(spec);
    Vector rate = semidiscrete_rate(a, spec.f, u);
    double t = 0.0;
    traj.times.push_back(t);
    traj.states.push_back(u);
    traj.rates.push_back(rate);
    bool last_stored = true;

    const std::size_t n = u.size();
    Vector stage(n), k2, k3, k4, next(n);
    long long since_store = 0;

    auto rate_at = [&](std::span<const double> v) -> std::optional<Vector> {
        if (!inside_unit(v)) {
            return std::nullopt;
        }
        return semidiscrete_rate(a, spec.f, v);
    };

    while (t < cfg.stop_time) {
        if (traj.steps >= cfg.max_steps) {
            fail(ErrorCode::IntegrationFailure, "integrate_oracle: step budget exhausted before stop_time or quench");
        }
        const double step = std::min(dt, cfg.stop_time - t);
        const double last = t + step >= cfg.stop_time ? cfg.stop_time : t + step;

        bool ok = true;
        for (std::size_t i = 0; i < n; ++i) stage[i] = u[i] + 0.5 * step * rate[i];
        auto r2 = rate_at(stage);
        ok = r2.has_value();
        if (ok) {
            k2 = std::move(*r2);
            for (std::size_t i = 0; i < n; ++i) stage[i] = u[i] + 0.5 * step * k2[i];
            auto r3 = rate_at(stage);
            ok = r3.has_value();
            if (ok) {
                k3 = std::move(*r3);
                for (std::size_t i = 0; i < n; ++i) stage[i] = u[i] + step * k3[i];
                auto r4 = rate_at(stage);
                ok = r4.has_value();
                if (ok) {
                    k4 = std::move(*r4);
                }
            }
        }
        double growth = 0.0;
        const double umax = max_of(u);
        if (ok) {
            for (std::size_t i = 0; i < n; ++i) {
                next[i] = u[i] + step / 6.0 * (rate[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            for (double v : next) {
                if (std::isnan(v)) {
                    fail(ErrorCode::IntegrationFailure, "integrate_oracle: NaN in state");
                }
            }
            ok = inside_unit(next);
            growth = max_of(next) - umax;
        }
        if (!ok || growth > 1e-2 || growth > 0.25 * (1.0 - umax)) {
            dt *= 0.5;
            if (dt < dt_floor) {
                fail(ErrorCode::IntegrationFailure,
                     "integrate_oracle: step size collapsed without reaching the quench threshold");
            }
            continue;
        }
        for (double v : next) {
            if (v < 0.0) {
                fail(ErrorCode::IntegrationFailure, "integrate_oracle: state left [0, 1)");
            }
        }

        const double t_prev = t;
        Vector u_prev = u;
        Vector rate_prev = rate;
        t = last;
        u = next;
        rate = semidiscrete_rate(a, spec.f, u);
        ++traj.steps;
        ++since_store;

        const bool quench = max_of(u) >= cfg.quench_threshold;
        if (quench && !last_stored) {
            traj.times.push_back(t_prev);
            traj.states.push_back(u_prev);
            traj.rates.push_back(rate_prev);
        }
        last_stored = false;
        if (quench || since_store >= cfg.checkpoint_stride || t >= cfg.stop_time) {
            traj.times.push_back(t);
            traj.states.push_back(u);
            traj.rates.push_back(rate);
            since_store = 0;
            last_stored = true;
        }
        if (quench) {
            traj.quenched = true;
            const std::size_t j = traj.times.size() - 1;
            double lo = traj.times[j - 1];
            double hi = traj.times[j];
            for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                Vector v = hermite(traj.times[j - 1], traj.states[j - 1], traj.rates[j - 1],
                                   traj.times[j], traj.states[j], traj.rates[j], mid);
                if (max_of(v) >= cfg.quench_threshold) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            traj.quench_time_estimate = hi;
            break;
        }
    }
    return traj;
}

Vector oracle_at(const OracleTrajectory& traj, double t) {
    require(!traj.times.empty(), "oracle_at: empty trajectory");
    require(t >= traj.times.front() && t <= traj.times.back(), "oracle_at: t outside the stored range");
    auto it = std::lower_bound(traj.times.begin(), traj.times.end(), t);
    std::size_t j = static_cast<std::size_t>(it - traj.times.begin());
    if (traj.times[j] == t) {
        return traj.states[j];
    }
    return hermite(traj.times[j - 1], traj.states[j - 1], traj.rates[j - 1],
                   traj.times[j], traj.states[j], traj.rates[j], t);
}

Vector truncation_probe(const std::function<double(double, double)>& u_exact,
                        const std::function<double(double, double)>& u_xx,
                        const Grid& grid, double t) {
    auto x = grid.nodes();
    auto h = grid.spacings();
    const int n = grid.interior_count();
    const TridiagonalOperator a = assemble_A(grid);
    Vector interior(n);
    for (int i = 0; i < n; ++i) {
        interior[i] = u_exact(t, x[i + 1]);
    }
    Vector out = a.apply(interior);
    // Boundary lift: the stencil's neighbours at x_0 and x_{N+1}.
    out.front() += 2.0 * u_exact(t, x.front()) / (h[0] * (h[0] + h[1]));
    out.back() += 2.0 * u_exact(t, x.back()) / (h[n] * (h[n - 1] + h[n]));
    for (int i = 0; i < n; ++i) {
        out[i] -= u_xx(t, x[i + 1]);
    }
    return out;
}

void write_oracle_csv(std::ostream& os, const OracleTrajectory& traj) {
    const std::size_t n = traj.states.empty() ? 0 : traj.states.front().size();
    os << "t";
    for (std::size_t i = 1; i <= n; ++i) {
        os << ",U_" << i;
    }
    os << ",max_U\n";
    for (std::size_t j = 0; j < traj.times.size(); ++j) {
        os << fmt17(traj.times[j]);
        for (double v : traj.states[j]) {
            os << ',' << fmt17(v);
        }
        os << ',' << fmt17(*std::max_element(traj.states[j].begin(), traj.states[j].end())) << '\n';
    }
}

} // namespace qsplit
