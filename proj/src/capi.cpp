#include "qsplit/qsplit.h"

#include "qsplit/error.hpp"
#include "qsplit/harness.hpp"
#include "qsplit/io.hpp"
#include "qsplit/semidiscrete.hpp"

#include <filesystem>
#include <new>
#include <string>

struct qsplit_config {
    qsplit::RunConfig cfg;
};

struct qsplit_trajectory {
    qsplit::Trajectory traj;
};

namespace {

thread_local std::string last_error;

qsplit_status map_code(qsplit::ErrorCode code) {
    using qsplit::ErrorCode;
    switch (code) {
    case ErrorCode::InvalidArgument: return QSPLIT_INVALID_ARGUMENT;
    case ErrorCode::UnsupportedSize: return QSPLIT_UNSUPPORTED_SIZE;
    case ErrorCode::IntegrationFailure: return QSPLIT_INTEGRATION_FAILURE;
    case ErrorCode::Nonconvergence: return QSPLIT_NONCONVERGENCE;
    case ErrorCode::SingularityContact: return QSPLIT_SINGULARITY_CONTACT;
    case ErrorCode::StructureViolation: return QSPLIT_STRUCTURE_VIOLATION;
    case ErrorCode::InvalidBracket: return QSPLIT_INVALID_BRACKET;
    case ErrorCode::Inconclusive: return QSPLIT_INCONCLUSIVE;
    case ErrorCode::Io: return QSPLIT_IO;
    }
    return QSPLIT_INTERNAL;
}

template <class F>
qsplit_status guarded(F&& body) {
    last_error.clear();
    try {
        return body();
    } catch (const qsplit::Error& e) {
        last_error = e.what();
        return map_code(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return QSPLIT_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return QSPLIT_INTERNAL;
    } catch (...) {
        last_error = "unknown exception";
        return QSPLIT_INTERNAL;
    }
}

qsplit_status null_arg(const char* what) {
    last_error = std::string(what) + " must not be null";
    return QSPLIT_INVALID_ARGUMENT;
}

std::filesystem::path prepare_dir(const char* out_dir) {
    std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        qsplit::fail(qsplit::ErrorCode::Io, "cannot create output directory '" + dir.string() + "': " + ec.message());
    }
    return dir;
}

int hard_count(const qsplit::RunSummary& s) {
    int n = 0;
    for (const auto& v : s.violations) n += v.hard ? 1 : 0;
    return n;
}

qsplit::RunOptions run_options(const qsplit::RunConfig& c) {
    qsplit::RunOptions o;
    o.stop_time = c.run.stop_time;
    o.stop_on_violation = c.run.stop_on_violation;
    return o;
}

} // namespace

extern "C" {

const char* qsplit_status_name(qsplit_status status) {
    switch (status) {
    case QSPLIT_OK: return "ok";
    case QSPLIT_INVALID_ARGUMENT: return "invalid-argument";
    case QSPLIT_UNSUPPORTED_SIZE: return "unsupported-size";
    case QSPLIT_INTEGRATION_FAILURE: return "integration-failure";
    case QSPLIT_NONCONVERGENCE: return "nonconvergence";
    case QSPLIT_SINGULARITY_CONTACT: return "singularity-contact";
    case QSPLIT_STRUCTURE_VIOLATION: return "structure-violation";
    case QSPLIT_INVALID_BRACKET: return "invalid-bracket";
    case QSPLIT_INCONCLUSIVE: return "inconclusive";
    case QSPLIT_IO: return "io";
    case QSPLIT_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* qsplit_last_error(void) { return last_error.c_str(); }

qsplit_status qsplit_config_default(qsplit_config** out) {
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = new qsplit_config{};
        return QSPLIT_OK;
    });
}

qsplit_status qsplit_config_parse(const char* json_text, qsplit_config** out) {
    if (!json_text) return null_arg("json_text");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] {
        *out = new qsplit_config{qsplit::parse_run_config(json_text)};
        return QSPLIT_OK;
    });
}

qsplit_status qsplit_config_load(const char* path, qsplit_config** out) {
    if (!path) return null_arg("path");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] {
        *out = new qsplit_config{qsplit::load_run_config(path)};
        return QSPLIT_OK;
    });
}

void qsplit_config_free(qsplit_config* cfg) { delete cfg; }

qsplit_status qsplit_config_check(const qsplit_config* cfg) {
    if (!cfg) return null_arg("cfg");
    return guarded([&] {
        const qsplit::ProblemSpec spec = qsplit::make_spec(cfg->cfg.problem);
        qsplit::validate_problem(spec);
        const auto problems = qsplit::check_admissible(spec.f, spec.u0, spec.grid);
        if (!problems.empty()) {
            qsplit::fail(qsplit::ErrorCode::InvalidArgument, "inadmissible data: " + problems.front());
        }
        return QSPLIT_OK;
    });
}

int qsplit_config_size(const qsplit_config* cfg) { return cfg ? cfg->cfg.problem.n : 0; }

qsplit_status qsplit_step(const qsplit_config* cfg, const double* u, int n, double* u_next, double* tau_used) {
    if (!cfg) return null_arg("cfg");
    if (!u || !u_next || !tau_used) return null_arg("state pointers");
    return guarded([&] {
        const qsplit::ProblemSpec spec = qsplit::make_spec(cfg->cfg.problem);
        qsplit::require(n == spec.grid.interior_count(), "qsplit_step: n does not match the configured N");
        const qsplit::TridiagonalOperator a = qsplit::assemble_A(spec.grid);
        qsplit::SplitState state;
        state.u.assign(u, u + n);
        const qsplit::StepOutcome out = qsplit::splitting_step(state, a, spec.grid.weights(), spec.f, spec.delta,
                                                               cfg->cfg.run.tol, qsplit::RunOptions{}.max_inner);
        std::copy(out.next.u.begin(), out.next.u.end(), u_next);
        *tau_used = out.tau_used;
        return QSPLIT_OK;
    });
}

qsplit_status qsplit_run(const qsplit_config* cfg, qsplit_trajectory** out) {
    if (!cfg) return null_arg("cfg");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] {
        const qsplit::ProblemSpec spec = qsplit::make_spec(cfg->cfg.problem);
        auto* t = new qsplit_trajectory{qsplit::run_to_quench(spec, cfg->cfg.run.tol, run_options(cfg->cfg))};
        *out = t;
        return hard_count(t->traj.summary) > 0 ? QSPLIT_STRUCTURE_VIOLATION : QSPLIT_OK;
    });
}

void qsplit_trajectory_free(qsplit_trajectory* traj) { delete traj; }

qsplit_status qsplit_trajectory_summary(const qsplit_trajectory* traj, qsplit_run_summary* out) {
    if (!traj) return null_arg("traj");
    if (!out) return null_arg("out");
    const qsplit::RunSummary& s = traj->traj.summary;
    out->quenched = s.quenched ? 1 : 0;
    out->quench_time = s.quench_time;
    out->steps = s.steps;
    out->tau0 = s.tau0;
    out->bound_sigma_tau = s.bound_sigma_tau;
    out->violations = static_cast<int>(s.violations.size());
    out->hard_violations = hard_count(s);
    return QSPLIT_OK;
}

qsplit_status qsplit_trajectory_final_state(const qsplit_trajectory* traj, double* out, int capacity, int* n) {
    if (!traj) return null_arg("traj");
    if (!n) return null_arg("n");
    const auto& u = traj->traj.final_state;
    *n = static_cast<int>(u.size());
    if (capacity < *n || !out) {
        last_error = "qsplit_trajectory_final_state: capacity too small";
        return QSPLIT_INVALID_ARGUMENT;
    }
    std::copy(u.begin(), u.end(), out);
    return QSPLIT_OK;
}

qsplit_status qsplit_trajectory_write_csv(const qsplit_trajectory* traj, const char* path) {
    if (!traj) return null_arg("traj");
    if (!path) return null_arg("path");
    return guarded([&] {
        qsplit::write_file(path, [&](std::ostream& os) { qsplit::write_trajectory_csv(os, traj->traj); });
        return QSPLIT_OK;
    });
}

qsplit_status qsplit_trajectory_write_summary(const qsplit_trajectory* traj, const char* path) {
    if (!traj) return null_arg("traj");
    if (!path) return null_arg("path");
    return guarded([&] {
        qsplit::write_file(path, [&](std::ostream& os) { qsplit::write_summary_json(os, traj->traj.summary); });
        return QSPLIT_OK;
    });
}

qsplit_status qsplit_mode_run(const qsplit_config* cfg, const char* out_dir) {
    if (!cfg) return null_arg("cfg");
    if (!out_dir) return null_arg("out_dir");
    return guarded([&] {
        const qsplit::RunConfig& c = cfg->cfg;
        const auto dir = prepare_dir(out_dir);
        const qsplit::ProblemSpec spec = qsplit::make_spec(c.problem);
        qsplit::RunOptions o = run_options(c);
        o.record_states = false;
        const qsplit::Trajectory traj = qsplit::run_to_quench(spec, c.run.tol, o);
        qsplit::write_file(dir / "grid.json", [&](std::ostream& os) { qsplit::write_grid_json(os, spec.grid); });
        qsplit::write_file(dir / "trajectory.csv", [&](std::ostream& os) { qsplit::write_trajectory_csv(os, traj); });
        qsplit::write_file(dir / "summary.json", [&](std::ostream& os) { qsplit::write_summary_json(os, traj.summary); });
        if (c.run.oracle) {
            qsplit::OracleConfig oc;
            oc.dt_safety = c.run.oracle_dt_safety;
            oc.stop_time = c.run.stop_time;
            oc.quench_threshold = spec.quench_threshold;
            oc.checkpoint_stride = c.run.oracle_stride;
            const qsplit::OracleTrajectory ot = qsplit::integrate_oracle(spec, oc);
            qsplit::write_file(dir / "oracle.csv", [&](std::ostream& os) { qsplit::write_oracle_csv(os, ot); });
        }
        if (hard_count(traj.summary) > 0) {
            for (const auto& v : traj.summary.violations) {
                if (v.hard) {
                    last_error = "structure violation at step " + std::to_string(v.k) + " (" + v.monitor +
                                 "): " + v.detail;
                    break;
                }
            }
            return QSPLIT_STRUCTURE_VIOLATION;
        }
        return QSPLIT_OK;
    });
}

namespace {

qsplit_status finish_order(const qsplit::OrderReport& report, const std::filesystem::path& dir, const char* stem,
                           double* order) {
    qsplit::write_file(dir / (std::string(stem) + ".json"),
                       [&](std::ostream& os) { qsplit::write_order_report_json(os, report); });
    qsplit::write_file(dir / (std::string(stem) + ".csv"),
                       [&](std::ostream& os) { qsplit::write_order_report_csv(os, report); });
    if (!report.summary_order) {
        last_error = "order estimate absent: degenerate level ratio";
        return QSPLIT_INCONCLUSIVE;
    }
    if (order) *order = *report.summary_order;
    return QSPLIT_OK;
}

} // namespace

qsplit_status qsplit_mode_converge_time(const qsplit_config* cfg, const char* out_dir, double* order) {
    if (!cfg) return null_arg("cfg");
    if (!out_dir) return null_arg("out_dir");
    return guarded([&] {
        const qsplit::RunConfig& c = cfg->cfg;
        const auto dir = prepare_dir(out_dir);
        const qsplit::OrderReport report = qsplit::converge_time(qsplit::make_spec(c.problem), c.converge_time.t_star,
                                                                 c.converge_time.levels, c.converge_time.options);
        return finish_order(report, dir, "order_time", order);
    });
}

qsplit_status qsplit_mode_converge_space(const qsplit_config* cfg, const char* out_dir, double* order) {
    if (!cfg) return null_arg("cfg");
    if (!out_dir) return null_arg("out_dir");
    return guarded([&] {
        const qsplit::RunConfig& c = cfg->cfg;
        const auto dir = prepare_dir(out_dir);
        const qsplit::OrderReport report =
            qsplit::converge_space(c.problem, c.converge_space.t_star, c.converge_space.options);
        return finish_order(report, dir, "order_space", order);
    });
}

qsplit_status qsplit_mode_critical_a(const qsplit_config* cfg, const char* out_dir, double* a_star) {
    if (!cfg) return null_arg("cfg");
    if (!out_dir) return null_arg("out_dir");
    return guarded([&] {
        const qsplit::RunConfig& c = cfg->cfg;
        const auto dir = prepare_dir(out_dir);
        qsplit::CriticalReport report;
        auto write = [&](const std::string& status, const std::string& message) {
            qsplit::write_file(dir / "critical_a.json",
                               [&](std::ostream& os) { qsplit::write_critical_json(os, report, status, message); });
        };
        try {
            const double a = qsplit::find_critical_a(c.problem, c.critical_a.a_lo, c.critical_a.a_hi, c.critical_a.n,
                                                     c.critical_a.tol_a, c.critical_a.options, &report);
            write("ok", "");
            if (a_star) *a_star = a;
            return QSPLIT_OK;
        } catch (const qsplit::Error& e) {
            if (e.code() == qsplit::ErrorCode::Inconclusive || e.code() == qsplit::ErrorCode::InvalidBracket) {
                write(qsplit::to_string(e.code()), e.what());
            }
            throw;
        }
    });
}

qsplit_status qsplit_mode_validate(const qsplit_config* cfg, const char* out_dir, int* all_pass) {
    if (!out_dir) return null_arg("out_dir");
    return guarded([&] {
        const auto dir = prepare_dir(out_dir);
        const qsplit::ValidationOptions opts = cfg ? cfg->cfg.validate : qsplit::ValidationOptions{};
        const qsplit::ValidationReport report = qsplit::validate_linalg(opts);
        qsplit::write_file(dir / "validation.json", [&](std::ostream& os) { qsplit::write_validation_json(os, report); });
        if (all_pass) *all_pass = report.all_pass() ? 1 : 0;
        return QSPLIT_OK;
    });
}

} // extern "C"
