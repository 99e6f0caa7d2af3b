#pragma once

#include "qsplit/error.hpp"
#include "qsplit/harness.hpp"
#include "qsplit/splitting.hpp"

#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace qsplit {

struct RunModeConfig {
    double tol = 1e-13;
    double stop_time = std::numeric_limits<double>::infinity();
    bool stop_on_violation = true;
    bool oracle = false;           ///< also write the RK4 oracle trajectory
    double oracle_dt_safety = 0.5;
    int oracle_stride = 1;
};

struct TimeModeConfig {
    double t_star = 0.25;
    int levels = 4;
    TimeStudyOptions options;
};

struct SpaceModeConfig {
    double t_star = 0.25;
    SpaceStudyOptions options;
};

struct CriticalModeConfig {
    double a_lo = 0.5;
    double a_hi = 1.2;
    int n = 199;
    double tol_a = 0.005;
    CriticalOptions options;
};

struct RunConfig {
    ProblemConfig problem;
    RunModeConfig run;
    TimeModeConfig converge_time;
    SpaceModeConfig converge_space;
    CriticalModeConfig critical_a;
    ValidationOptions validate;
};

/// Parses a config document:
///   {problem:{a, N, grid:{kind, grading}, nonlinearity, initial:{kind, amplitude},
///             delta, quench_threshold, max_steps},
///    run:{...}, converge_time:{...}, converge_space:{...}, critical_a:{...}, validate:{...}}
/// Every section and key is optional; unknown keys and ill-typed values throw
/// InvalidArgument naming the offending key.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Minimal streaming JSON emitter; numbers are written with 17 significant digits.
class JsonWriter {
public:
    explicit JsonWriter(std::ostream& os) : os_(os) {}
    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array();
    JsonWriter& end_array();
    JsonWriter& key(const std::string& k);
    JsonWriter& value(double v);
    JsonWriter& value(int v);
    JsonWriter& value(long long v);
    JsonWriter& value(bool v);
    JsonWriter& value(const std::string& v);
    JsonWriter& value(const char* v) { return value(std::string(v)); }
    JsonWriter& null();
    /// Ends the document with a newline.
    void finish();

private:
    void separate();
    void indent();
    std::ostream& os_;
    std::vector<bool> first_;
    bool after_key_ = false;
};

std::string json_escape(const std::string& s);

/// {"a":..., "N":..., "x":[...]}
void write_grid_json(std::ostream& os, const Grid& grid);
/// {quenched, quench_time, steps, tau0, bound_Sigma_tau, monotone_hypothesis, termination, violations:[...]}
void write_summary_json(std::ostream& os, const RunSummary& summary);
void write_order_report_json(std::ostream& os, const OrderReport& report);
/// resolution,N,error,steps,hard_violations,observed_order
void write_order_report_csv(std::ostream& os, const OrderReport& report);
void write_critical_json(std::ostream& os, const CriticalReport& report, const std::string& status,
                         const std::string& message);
void write_validation_json(std::ostream& os, const ValidationReport& report);

/// Opens path in binary mode, hands the stream to fill, throws Io on failure.
template <class Fill>
void write_file(const std::filesystem::path& path, Fill&& fill) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        fail(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
    }
    fill(os);
    os.flush();
    if (!os) {
        fail(ErrorCode::Io, "write to '" + path.string() + "' failed");
    }
}

} // namespace qsplit
