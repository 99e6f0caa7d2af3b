#pragma once

#include "qsplit/model.hpp"
#include "qsplit/semidiscrete.hpp"
#include "qsplit/splitting.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qsplit {

/// Plain-data description of a problem; make_spec turns it into a ProblemSpec.
struct ProblemConfig {
    double a = 1.4142135623730951;
    int n = 99;
    std::string grid_kind = "uniform"; ///< "uniform" or "graded"
    double grading = 1.0;
    std::string nonlinearity = "kawarada";
    std::string initial = "zero";      ///< "zero" or "cosine"
    double initial_amplitude = 0.0;
    double delta = 0.1;
    double quench_threshold = 1.0 - 1e-3;
    int max_steps = 100000;
};

Grid make_grid(const ProblemConfig& cfg);
ProblemSpec make_spec(const ProblemConfig& cfg);

struct OrderLevel {
    double resolution = 0.0; ///< delta for time studies, max h_n for space studies
    double error = 0.0;      ///< weighted 2-norm error at t*
    int n = 0;
    int steps = 0;
    int hard_violations = 0;
};

struct OrderReport {
    std::string kind; ///< "time" or "space"
    double t_star = 0.0;
    std::vector<OrderLevel> levels;
    /// log(e_i / e_{i+1}) / log(r_i / r_{i+1}); absent when the two levels
    /// share a resolution or an error is not positive.
    std::vector<std::optional<double>> observed_orders;
    /// Least-squares slope of log e against log r; absent when any ratio is degenerate.
    std::optional<double> summary_order;
};

/// Turns (resolution, error) pairs into observed and least-squares orders.
void fill_orders(OrderReport& report);

struct TimeStudyOptions {
    double dt_safety = 0.05; ///< oracle step fraction
    double tol = 1e-13;
};

/// Runs the splitting scheme at delta, delta/2, ..., delta/2^(levels-1) and
/// measures the error at t_star against the RK4 oracle on the same grid.
/// Throws InvalidArgument for levels < 3 or when the oracle quenches before t_star.
OrderReport converge_time(const ProblemSpec& spec, double t_star, int levels,
                          const TimeStudyOptions& options = {});

struct SpaceStudyOptions {
    std::vector<int> n_levels{24, 49, 99, 199};
    int reference_n = 799;   ///< (reference_n + 1) must be a multiple of every (n + 1)
    double delta = 1e-6;
    OracleMethod oracle = OracleMethod::Sdirk2;
    double dt_safety = 0.5;     ///< Rk4 reference
    double implicit_dt = 1e-4;  ///< Sdirk2 reference
    double tol = 1e-13;
};

/// Runs the splitting scheme on each N in n_levels (grid family from cfg)
/// and compares at t_star against the oracle on the reference grid,
/// restricted by node coincidence.
OrderReport converge_space(const ProblemConfig& cfg, double t_star, const SpaceStudyOptions& options = {});

enum class Outcome { Quench, Steady, Undecided };

const char* to_string(Outcome o);

struct CriticalEvaluation {
    double a = 0.0;
    Outcome outcome = Outcome::Undecided;
    double t = 0.0;
    int steps = 0;
};

struct CriticalOptions {
    double budget_time = 200.0;
    double delta = 0.001;
    double stagnation_tol = 1e-10;
    int stagnation_window = 100;
    int max_steps = 2'000'000;
    double tol = 1e-13;
};

struct CriticalReport {
    double a_star = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    std::vector<CriticalEvaluation> evaluations;
};

/// One classification run at half-width a (grid family and f from cfg).
CriticalEvaluation classify_half_width(const ProblemConfig& cfg, double a, int n, const CriticalOptions& options);

/// Bisection for the critical half-width. Throws InvalidBracket when the
/// endpoints do not straddle the quench/steady transition and Inconclusive
/// when some run is undecided within budget_time; `partial`, when given,
/// receives the evaluations made so far in either case.
double find_critical_a(const ProblemConfig& cfg, double a_lo, double a_hi, int n, double tol_a,
                       const CriticalOptions& options = {}, CriticalReport* report = nullptr);

struct ValidationCheck {
    std::string grid;   ///< e.g. "uniform N=8" or "graded g=2 N=8"
    std::string name;
    bool pass = true;
    double worst_margin = 0.0; ///< >= 0 means pass for margin-style checks
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool all_pass() const;
};

struct ValidationOptions {
    std::vector<int> n_list{3, 8, 16};
    std::vector<double> gradings{1.5, 2.0};
    std::vector<double> taus{0.01, 0.1, 1.0, 10.0};
    std::vector<double> exp_times{0.1, 1.0, 10.0};
    int random_vectors = 100;
    double half_width = 1.0;
};

/// Runs the linear-algebra invariant suite on uniform grids for every N and
/// graded grids for every (grading, N). Exponential checks are skipped for N > 16.
ValidationReport validate_linalg(const ValidationOptions& options = {});

/// Linear-algebra suite on one operator; `label` names it in the report.
void validate_operator(const TridiagonalOperator& a, std::span<const double> weights, const std::string& label,
                       const ValidationOptions& options, ValidationReport& report);

/// Deterministic pseudo-random doubles in [-1, 1) from a fixed-seed mt19937_64
/// stream (raw bits, no library distribution).
std::vector<Vector> fixed_random_vectors(int count, int n, unsigned long long seed);

} // namespace qsplit
