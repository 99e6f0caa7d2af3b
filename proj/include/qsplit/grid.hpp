#pragma once

#include <span>
#include <string>
#include <vector>

namespace qsplit {

/// Nonuniform mesh -a = x_0 < x_1 < ... < x_{N+1} = a.
///
/// Nodes are the stored quantity; spacings h_n = x_{n+1} - x_n and the norm
/// weights w_k = (h_{k-1} + h_k) / 2 (k = 1..N) are derived once at
/// construction. Immutable after construction.
class Grid {
public:
    /// Builds a grid from explicit nodes and throws InvalidArgument when
    /// validate() reports anything.
    static Grid from_nodes(double a, std::vector<double> nodes);

    /// Same as from_nodes but skips validation. Used for diagnostics and tests
    /// that need a deliberately broken mesh.
    static Grid from_nodes_unchecked(double a, std::vector<double> nodes);

    double half_width() const { return a_; }
    int interior_count() const { return static_cast<int>(x_.size()) - 2; }

    /// All N+2 nodes, boundary included.
    std::span<const double> nodes() const { return x_; }
    /// The N interior nodes x_1..x_N.
    std::span<const double> interior_nodes() const {
        return std::span<const double>(x_).subspan(1, x_.size() - 2);
    }
    /// N+1 spacings h_0..h_N.
    std::span<const double> spacings() const { return h_; }
    /// N weights, entry k-1 holds (h_{k-1} + h_k) / 2.
    std::span<const double> weights() const { return w_; }

    double max_spacing() const;
    double min_spacing() const;

private:
    Grid(double a, std::vector<double> nodes);

    double a_;
    std::vector<double> x_;
    std::vector<double> h_;
    std::vector<double> w_;
};

Grid build_uniform(double a, int n);

/// Symmetric center-refined family x_n = a sign(s_n) |s_n|^grading with
/// s_n = -1 + 2n/(N+1). grading == 1 returns build_uniform(a, n).
Grid build_graded(double a, int n, double grading);

/// Every invariant violation, each naming the offending index; empty iff valid.
std::vector<std::string> validate(const Grid& grid);

} // namespace qsplit
