#include "qsplit/model.hpp"

#include "qsplit/error.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace qsplit {

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Relative slack for the sampled inequalities; the conditions are exact, the
// evaluation is not.
constexpr double kSampleSlack = 1e-12;

} // namespace

Nonlinearity kawarada() {
    Nonlinearity f;
    f.eval = [](double u) { return 1.0 / (1.0 - u); };
    f.deriv = [](double u) {
        const double r = 1.0 - u;
        return 1.0 / (r * r);
    };
    f.lipschitz = [](double x, double y) {
        const double r = 1.0 - std::max(x, y);
        return 1.0 / (r * r);
    };
    // 1/f(1-z) = z
    f.inv_f_one_minus_integral = [](double s) { return 0.5 * s * s; };
    f.label = "kawarada";
    return f;
}

Nonlinearity nonlinearity_by_label(const std::string& label) {
    if (label == "kawarada") {
        return kawarada();
    }
    fail(ErrorCode::InvalidArgument, "unknown nonlinearity '" + label + "'");
}

InitialCondition zero_initial(double a) {
    require(a > 0.0, "zero_initial: a must be positive");
    return InitialCondition{[](double) { return 0.0; }, [](double) { return 0.0; }, "zero", 0.0};
}

InitialCondition cosine_initial(double a, double amplitude) {
    require(a > 0.0, "cosine_initial: a must be positive");
    require(amplitude >= 0.0 && amplitude < 1.0, "cosine_initial: amplitude must be in [0,1)");
    const double k = std::numbers::pi / (2.0 * a);
    InitialCondition u0;
    u0.eval = [=](double x) {
        // Exact zeros at the ends; cos(pi/2) is not.
        if (std::abs(x) >= a) {
            return 0.0;
        }
        return amplitude * std::cos(k * x);
    };
    u0.second_deriv = [=](double x) { return -amplitude * k * k * std::cos(k * x); };
    u0.label = "cosine";
    u0.amplitude = amplitude;
    return u0;
}

std::vector<std::pair<double, double>> admissible_sample_pairs(int count) {
    // Kronecker sequence with the plastic-number rotations; deterministic and well spread.
    constexpr double g1 = 0.7548776662466927;
    constexpr double g2 = 0.5698402909980532;
    const double top = 1.0 - kAdmissibleEdge;
    std::vector<std::pair<double, double>> out;
    out.reserve(count);
    for (int i = 1; i <= count; ++i) {
        const double s = std::fmod(0.5 + g1 * i, 1.0);
        const double t = std::fmod(0.5 + g2 * i, 1.0);
        out.emplace_back(top * s, top * t);
    }
    return out;
}

std::vector<std::string> check_admissible(const Nonlinearity& f, const InitialCondition& u0, const Grid& grid) {
    std::vector<std::string> out;
    if (!f.eval || !f.deriv || !f.lipschitz) {
        out.push_back("nonlinearity is missing eval, deriv or lipschitz");
        return out;
    }

    const double f0 = f.eval(0.0);
    if (!(f0 > 0.0)) {
        out.push_back("f(0) > 0 fails: f(0) = " + num(f0));
    }

    const double top = 1.0 - kAdmissibleEdge;
    for (int i = 0; i < kAdmissibleSamplePoints; ++i) {
        const double x = top * i / (kAdmissibleSamplePoints - 1);
        const double d = f.deriv(x);
        if (!(d > 0.0)) {
            out.push_back("f'(x) > 0 fails at x = " + num(x));
            break;
        }
    }

    for (const auto& [x, y] : admissible_sample_pairs()) {
        const double fx = f.eval(x);
        const double fy = f.eval(y);
        const double lhs = std::abs(fx - fy);
        const double rhs = f.lipschitz(x, y) * std::abs(x - y);
        if (!(lhs <= rhs * (1.0 + kSampleSlack))) {
            out.push_back("Lipschitz envelope fails at (x, y) = (" + num(x) + ", " + num(y) + ")");
            break;
        }
        const double mid = f.eval(0.5 * (x + y));
        const double chord = 0.5 * (fx + fy);
        if (!(mid <= chord * (1.0 + kSampleSlack))) {
            out.push_back("midpoint convexity fails at (x, y) = (" + num(x) + ", " + num(y) + ")");
            break;
        }
    }

    double prev = -std::numeric_limits<double>::infinity();
    for (int e = 1; e <= 6; ++e) {
        const double eps = std::pow(10.0, -e);
        const double v = f.eval(1.0 - eps);
        if (!(v > prev) || !std::isfinite(v)) {
            out.push_back("f(1 - eps) is not increasing along the divergence ladder at eps = " + num(eps));
            break;
        }
        prev = v;
    }

    if (!u0.eval) {
        out.push_back("initial condition is missing eval");
        return out;
    }
    const double a = grid.half_width();
    const double left = u0.eval(-a);
    const double right = u0.eval(a);
    if (left != 0.0) {
        out.push_back("boundary condition u0(-a) = 0 fails: u0(-a) = " + num(left));
    }
    if (right != 0.0) {
        out.push_back("boundary condition u0(a) = 0 fails: u0(a) = " + num(right));
    }
    for (int i = 0; i < kAdmissibleSamplePoints; ++i) {
        const double x = -a + 2.0 * a * i / (kAdmissibleSamplePoints - 1);
        const double v = u0.eval(x);
        if (!(v >= 0.0 && v < 1.0)) {
            out.push_back("0 <= u0(x) < 1 fails at x = " + num(x));
            break;
        }
        if (u0.second_deriv) {
            const double s = u0.second_deriv(x) + f.eval(v);
            if (!(s > 0.0)) {
                out.push_back("u0'' + f(u0) > 0 fails at x = " + num(x));
                break;
            }
        }
    }

    // Discrete counterpart: A U0 + F(U0) > 0 at the interior nodes.
    if (out.empty()) {
        const Vector start = initial_vector(u0, grid);
        const Vector au = assemble_A(grid).apply(start);
        const Vector fu = apply_f(f, start);
        for (std::size_t n = 0; n < start.size(); ++n) {
            if (!(au[n] + fu[n] > 0.0)) {
                out.push_back("A U0 + F(U0) > 0 fails at node " + std::to_string(n + 1));
                break;
            }
        }
    }
    return out;
}

void validate_problem(const ProblemSpec& spec) {
    require(spec.delta > 0.0 && spec.delta < 1.0, "delta must lie in (0, 1)");
    require(spec.quench_threshold > 0.9 && spec.quench_threshold < 1.0, "quench_threshold must lie in (0.9, 1)");
    require(spec.max_steps >= 0, "max_steps must be nonnegative");
    require(static_cast<bool>(spec.f.eval), "problem has no nonlinearity");
    require(static_cast<bool>(spec.u0.eval), "problem has no initial condition");
}

Vector initial_vector(const InitialCondition& u0, const Grid& grid) {
    auto x = grid.interior_nodes();
    Vector out(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) {
        out[n] = u0.eval(x[n]);
    }
    return out;
}

Vector initial_vector(const ProblemSpec& spec) { return initial_vector(spec.u0, spec.grid); }

Vector apply_f(const Nonlinearity& f, std::span<const double> u) {
    Vector out(u.size());
    for (std::size_t n = 0; n < u.size(); ++n) {
        out[n] = f.eval(u[n]);
    }
    return out;
}

} // namespace qsplit
