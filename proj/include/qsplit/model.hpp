#pragma once

#include "qsplit/grid.hpp"
#include "qsplit/linalg.hpp"

#include <functional>
#include <string>
#include <vector>

namespace qsplit {

/// Reaction term f on [0,1) together with the derived quantities the solver
/// and its monitors need.
struct Nonlinearity {
    std::function<double(double)> eval;
    std::function<double(double)> deriv;
    /// Local Lipschitz envelope L(x,y) with |f(x)-f(y)| <= L(x,y) |x-y|.
    std::function<double(double, double)> lipschitz;
    /// s -> int_0^s 1/f(1-z) dz on [0,1].
    std::function<double(double)> inv_f_one_minus_integral;
    std::string label;
};

struct InitialCondition {
    std::function<double(double)> eval;
    std::function<double(double)> second_deriv;
    std::string label;
    double amplitude = 0.0; ///< parameter of the "cosine" family, 0 otherwise
};

struct ProblemSpec {
    Grid grid;
    Nonlinearity f;
    InitialCondition u0;
    double delta = 0.1;
    double quench_threshold = 1.0 - 1e-3;
    int max_steps = 100000;
};

/// f(u) = 1/(1-u).
Nonlinearity kawarada();

/// Looks a nonlinearity up by its label; only "kawarada" is registered.
Nonlinearity nonlinearity_by_label(const std::string& label);

InitialCondition zero_initial(double a);

/// u0(x) = c cos(pi x / (2a)); admissible for small c.
InitialCondition cosine_initial(double a, double amplitude);

/// Sampling densities used by check_admissible.
inline constexpr int kAdmissibleSamplePoints = 1000;
inline constexpr int kAdmissibleSamplePairs = 10000;
inline constexpr double kAdmissibleEdge = 1e-6;

/// Sample pairs in [0, 1 - 1e-6]^2 from a fixed additive-recurrence sequence;
/// identical on every call.
std::vector<std::pair<double, double>> admissible_sample_pairs(int count = kAdmissibleSamplePairs);

/// Every violated hypothesis on f, u0 and the discrete start vector. Empty
/// when the data are admissible.
std::vector<std::string> check_admissible(const Nonlinearity& f, const InitialCondition& u0, const Grid& grid);

/// Throws InvalidArgument for out-of-range delta, quench threshold or step budget.
void validate_problem(const ProblemSpec& spec);

/// u0 sampled at the interior nodes.
Vector initial_vector(const ProblemSpec& spec);
Vector initial_vector(const InitialCondition& u0, const Grid& grid);

/// Componentwise F(U)_n = f(U_n).
Vector apply_f(const Nonlinearity& f, std::span<const double> u);

} // namespace qsplit
