#include "qsplit/error.hpp"
#include "qsplit/grid.hpp"
#include "qsplit/model.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace qsplit;

namespace {

bool mentions(const std::vector<std::string>& msgs, const std::string& needle) {
    for (const auto& m : msgs)
        if (m.find(needle) != std::string::npos) return true;
    return false;
}

// Composite Simpson rule, used as an independent check of the closed-form integral.
double simpson(const std::function<double(double)>& g, double lo, double hi, int n = 2000) {
    const double h = (hi - lo) / n;
    double s = g(lo) + g(hi);
    for (int i = 1; i < n; ++i) s += g(lo + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

} // namespace

TEST_CASE("kawarada values") {
    const Nonlinearity f = kawarada();
    CHECK(f.eval(0.0) == 1.0);
    CHECK(f.deriv(0.5) == doctest::Approx(4.0));
    CHECK(f.inv_f_one_minus_integral(1.0) == doctest::Approx(0.5));
    CHECK(f.label == "kawarada");
    for (double s : {0.1, 0.5, 0.9, 1.0}) {
        const double ref = simpson([&](double z) { return 1.0 / f.eval(1.0 - z); }, 0.0, s);
        CHECK(f.inv_f_one_minus_integral(s) == doctest::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("kawarada sampled structure") {
    const Nonlinearity f = kawarada();
    CHECK(f.eval(0.0) > 0.0);
    for (const auto& [x, y] : admissible_sample_pairs(2000)) {
        CHECK(f.deriv(x) > 0.0);
        CHECK(std::abs(f.eval(x) - f.eval(y)) <= f.lipschitz(x, y) * std::abs(x - y) * (1 + 1e-12));
        CHECK(f.eval(0.5 * (x + y)) <= 0.5 * (f.eval(x) + f.eval(y)) * (1 + 1e-12));
    }
    double prev = f.eval(0.0);
    for (double eps = 0.5; eps > 1e-12; eps /= 10) {
        const double v = f.eval(1.0 - eps);
        CHECK(v > prev);
        prev = v;
    }
    CHECK(prev > 1e11);
}

TEST_CASE("sample pairs are deterministic and inside the unit square") {
    const auto p = admissible_sample_pairs(500);
    const auto q = admissible_sample_pairs(500);
    REQUIRE(p.size() == 500);
    CHECK(p == q);
    for (const auto& [x, y] : p) {
        CHECK(x >= 0.0);
        CHECK(y >= 0.0);
        CHECK(x <= 1.0 - kAdmissibleEdge);
        CHECK(y <= 1.0 - kAdmissibleEdge);
    }
}

TEST_CASE("nonlinearity lookup") {
    CHECK(nonlinearity_by_label("kawarada").eval(0.5) == doctest::Approx(2.0));
    CHECK_THROWS_AS(nonlinearity_by_label("arrhenius"), Error);
}

TEST_CASE("zero initial condition") {
    const InitialCondition u0 = zero_initial(2.0);
    CHECK(u0.eval(0.0) == 0.0);
    CHECK(u0.eval(-2.0) == 0.0);
    CHECK(u0.second_deriv(0.3) == 0.0);
}

TEST_CASE("cosine initial condition") {
    const double a = 1.5;
    const InitialCondition u0 = cosine_initial(a, 0.2);
    CHECK(u0.eval(a) == 0.0);
    CHECK(u0.eval(-a) == 0.0);
    CHECK(u0.eval(0.0) == doctest::Approx(0.2));
    const double k = std::numbers::pi / (2 * a);
    CHECK(u0.second_deriv(0.4) == doctest::Approx(-0.2 * k * k * std::cos(k * 0.4)));
    CHECK_THROWS_AS(cosine_initial(a, 1.0), Error);
}

TEST_CASE("admissibility") {
    const double a = std::sqrt(2.0);
    const Grid g = build_uniform(a, 9);
    SUBCASE("kawarada from rest") {
        CHECK(check_admissible(kawarada(), zero_initial(a), g).empty());
        // The discrete condition holds with margin: A U0 = 0 and F(U0) = 1.
        const Vector u = initial_vector(zero_initial(a), g);
        const Vector au = assemble_A(g).apply(u);
        const Vector fu = apply_f(kawarada(), u);
        for (std::size_t n = 0; n < u.size(); ++n) CHECK(au[n] + fu[n] == doctest::Approx(1.0));
    }
    SUBCASE("source vanishing at zero") {
        Nonlinearity f = kawarada();
        f.eval = [](double u) { return u / (1.0 - u); };
        f.deriv = [](double u) { return 1.0 / ((1.0 - u) * (1.0 - u)); };
        CHECK(mentions(check_admissible(f, zero_initial(a), g), "f(0) > 0 fails"));
    }
    SUBCASE("initial condition off the boundary value") {
        InitialCondition u0 = zero_initial(a);
        u0.eval = [](double) { return 0.1; };
        const auto v = check_admissible(kawarada(), u0, g);
        CHECK(mentions(v, "boundary condition u0(a) = 0 fails"));
        CHECK(mentions(v, "boundary condition u0(-a) = 0 fails"));
    }
    SUBCASE("initial condition at or above one") {
        InitialCondition u0 = cosine_initial(a, 0.5);
        u0.eval = [=](double x) { return std::abs(x) >= a ? 0.0 : 1.2; };
        CHECK(mentions(check_admissible(kawarada(), u0, g), "0 <= u0(x) < 1 fails"));
    }
    SUBCASE("small cosine bump is admissible") {
        CHECK(check_admissible(kawarada(), cosine_initial(a, 0.1), g).empty());
    }
}

TEST_CASE("problem validation") {
    const double a = 1.0;
    ProblemSpec spec{build_uniform(a, 5), kawarada(), zero_initial(a)};
    CHECK_NOTHROW(validate_problem(spec));
    spec.delta = 1.0;
    CHECK_THROWS_AS(validate_problem(spec), Error);
    spec.delta = 0.1;
    spec.quench_threshold = 1.0;
    CHECK_THROWS_AS(validate_problem(spec), Error);
    spec.quench_threshold = 0.999;
    spec.max_steps = -1;
    CHECK_THROWS_AS(validate_problem(spec), Error);
}

TEST_CASE("initial vector and F") {
    const double a = 2.0;
    const Grid g = build_uniform(a, 3);
    const Vector u = initial_vector(cosine_initial(a, 0.4), g);
    REQUIRE(u.size() == 3);
    CHECK(u[1] == doctest::Approx(0.4));
    CHECK(u[0] == doctest::Approx(0.4 * std::cos(std::numbers::pi / 4)));
    const Vector fu = apply_f(kawarada(), u);
    for (int i = 0; i < 3; ++i) CHECK(fu[i] == doctest::Approx(1.0 / (1.0 - u[i])));
}
