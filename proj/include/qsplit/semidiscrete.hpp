#pragma once

#include "qsplit/grid.hpp"
#include "qsplit/linalg.hpp"
#include "qsplit/model.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

namespace qsplit {

enum class OracleMethod {
    Rk4,    ///< explicit, parabolic step restriction
    Sdirk2, ///< two-stage L-stable SDIRK with fixed step; for strongly graded grids
};

struct OracleConfig {
    OracleMethod method = OracleMethod::Rk4;
    double dt_safety = 0.5;  ///< fraction of min(h_{n-1} h_n)/4, in (0,1]
    double implicit_dt = 1e-5; ///< step of the Sdirk2 method
    double stop_time = std::numeric_limits<double>::infinity();
    double quench_threshold = 1.0 - 1e-3;
    int checkpoint_stride = 1;     ///< store every k-th accepted step (the last one always)
    long long max_steps = 50'000'000;
};

struct OracleTrajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    std::vector<Vector> rates;  ///< A U + F(U) at each stored state
    bool quenched = false;
    std::optional<double> quench_time_estimate;
    double quench_threshold = 1.0 - 1e-3;
    long long steps = 0;
};

/// Classical RK4 on dU/dt = A U + F(U) with the parabolic step
/// dt = dt_safety * min_n(h_{n-1} h_n) / 4. A step is rejected and dt halved
/// when it would raise max U by more than 1e-2 (or by more than a quarter of
/// the remaining gap to 1), or when any stage leaves [0,1). Runs until
/// stop_time, or until max U crosses the quench threshold; the crossing time
/// is then refined by bisection on the Hermite interpolant.
///
/// With OracleMethod::Sdirk2 the system is advanced instead by the stiffly
/// accurate two-stage SDIRK scheme (gamma = 1 - 1/sqrt 2) at the fixed step
/// implicit_dt, each stage solved by Newton's method with a tridiagonal
/// Jacobian. Its cost does not depend on the smallest spacing.
OracleTrajectory integrate_oracle(const ProblemSpec& spec, const OracleConfig& cfg);

/// Cubic Hermite interpolation in time using the stored rates.
Vector oracle_at(const OracleTrajectory& traj, double t);

/// A U + F(U).
Vector semidiscrete_rate(const TridiagonalOperator& a, const Nonlinearity& f, std::span<const double> u);

/// Central-difference residual D2[u(t,.)] - u_xx(t,.) at the interior nodes,
/// where D2 is the nonuniform three-point stencil (A plus the boundary values
/// of u).
Vector truncation_probe(const std::function<double(double, double)>& u_exact,
                        const std::function<double(double, double)>& u_xx,
                        const Grid& grid, double t);

/// CSV with header t,U_1..U_N,max_U; floats at 17 significant digits.
void write_oracle_csv(std::ostream& os, const OracleTrajectory& traj);

} // namespace qsplit
