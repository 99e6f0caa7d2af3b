#include "qsplit/grid.hpp"

#include "qsplit/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace qsplit {

namespace {

std::string fmt_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Endpoint and total-length checks are relative to the domain size.
double length_tolerance(double a) { return 1e-12 * std::max(1.0, 2.0 * std::abs(a)); }

} // namespace

Grid::Grid(double a, std::vector<double> nodes) : a_(a), x_(std::move(nodes)) {
    if (x_.size() < 2) {
        return;
    }
    h_.resize(x_.size() - 1);
    for (std::size_t n = 0; n + 1 < x_.size(); ++n) {
        h_[n] = x_[n + 1] - x_[n];
    }
    w_.resize(h_.size() - 1);
    for (std::size_t k = 1; k < h_.size(); ++k) {
        w_[k - 1] = 0.5 * (h_[k - 1] + h_[k]);
    }
}

Grid Grid::from_nodes_unchecked(double a, std::vector<double> nodes) {
    return Grid(a, std::move(nodes));
}

Grid Grid::from_nodes(double a, std::vector<double> nodes) {
    require(a > 0.0, "grid half-width must be positive");
    require(nodes.size() >= 3, "grid needs at least one interior node");
    Grid g(a, std::move(nodes));
    auto problems = validate(g);
    if (!problems.empty()) {
        fail(ErrorCode::InvalidArgument, "invalid grid: " + problems.front());
    }
    return g;
}

double Grid::max_spacing() const { return *std::max_element(h_.begin(), h_.end()); }
double Grid::min_spacing() const { return *std::min_element(h_.begin(), h_.end()); }

Grid build_uniform(double a, int n) {
    require(std::isfinite(a) && a > 0.0, "build_uniform: a must be positive");
    require(n >= 1, "build_uniform: N must be at least 1");
    const double m = static_cast<double>(n) + 1.0;
    std::vector<double> x(static_cast<std::size_t>(n) + 2);
    // Integer numerator keeps x_{N+1-n} = -x_n exactly.
    for (int i = 0; i <= n + 1; ++i) {
        x[i] = a * (2.0 * i - m) / m;
    }
    x.front() = -a;
    x.back() = a;
    return Grid::from_nodes(a, std::move(x));
}

Grid build_graded(double a, int n, double grading) {
    require(std::isfinite(a) && a > 0.0, "build_graded: a must be positive");
    require(n >= 1, "build_graded: N must be at least 1");
    require(std::isfinite(grading) && grading >= 1.0, "build_graded: grading must be >= 1");
    if (grading == 1.0) {
        return build_uniform(a, n);
    }
    const double m = static_cast<double>(n) + 1.0;
    std::vector<double> x(static_cast<std::size_t>(n) + 2);
    for (int i = 0; i <= n + 1; ++i) {
        const double s = (2.0 * i - m) / m;
        x[i] = a * std::copysign(std::pow(std::abs(s), grading), s);
    }
    x.front() = -a;
    x.back() = a;
    return Grid::from_nodes(a, std::move(x));
}

std::vector<std::string> validate(const Grid& grid) {
    std::vector<std::string> out;
    const double a = grid.half_width();
    if (!(a > 0.0) || !std::isfinite(a)) {
        out.push_back("a = " + fmt_num(a) + " is not positive");
    }
    auto x = grid.nodes();
    if (x.size() < 3) {
        out.push_back("N = " + std::to_string(static_cast<long>(x.size()) - 2) + " is below 1");
        return out;
    }
    const double tol = length_tolerance(a);
    if (!(std::abs(x.front() + a) <= tol)) {
        out.push_back("x_0 = " + fmt_num(x.front()) + " differs from -a = " + fmt_num(-a) + " at index 0");
    }
    auto h = grid.spacings();
    for (std::size_t n = 0; n < h.size(); ++n) {
        if (!(h[n] > 0.0)) {
            out.push_back("h_" + std::to_string(n) + " = " + fmt_num(h[n]) + " at index " + std::to_string(n));
        }
    }
    const double total = std::accumulate(h.begin(), h.end(), 0.0);
    if (!(std::abs(total - 2.0 * a) <= tol)) {
        out.push_back("sum of h = " + fmt_num(total) + " differs from 2a = " + fmt_num(2.0 * a));
    }
    auto w = grid.weights();
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (w[k] != 0.5 * (h[k] + h[k + 1])) {
            out.push_back("weight at index " + std::to_string(k + 1) + " does not equal (h_{k-1}+h_k)/2");
        }
    }
    return out;
}

} // namespace qsplit
