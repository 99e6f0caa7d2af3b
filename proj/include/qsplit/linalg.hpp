#pragma once

#include "qsplit/grid.hpp"

#include <limits>
#include <span>
#include <vector>

namespace qsplit {

using Vector = std::vector<double>;

/// Row-major square matrix for desk-scale validation work.
class DenseMatrix {
public:
    DenseMatrix() = default;
    explicit DenseMatrix(int n, double fill = 0.0)
        : n_(n), data_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), fill) {}

    static DenseMatrix identity(int n);

    int size() const { return n_; }
    double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * n_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * n_ + j]; }

    Vector multiply(std::span<const double> v) const;
    DenseMatrix multiply(const DenseMatrix& rhs) const;
    double norm_inf() const;

private:
    int n_ = 0;
    std::vector<double> data_;
};

/// Tridiagonal matrix stored as three diagonals.
///
/// sub[i] holds entry (i+1, i), sup[i] holds entry (i, i+1), both of length n-1.
class TridiagonalOperator {
public:
    TridiagonalOperator(Vector sub, Vector diag, Vector sup);

    int size() const { return static_cast<int>(diag_.size()); }
    std::span<const double> sub() const { return sub_; }
    std::span<const double> diag() const { return diag_; }
    std::span<const double> sup() const { return sup_; }

    Vector apply(std::span<const double> v) const;
    void apply(std::span<const double> v, std::span<double> out) const;
    Vector row_sums() const;
    DenseMatrix to_dense() const;

private:
    Vector sub_;
    Vector diag_;
    Vector sup_;
};

/// Central-difference second-derivative matrix on a nonuniform grid with
/// homogeneous Dirichlet ends:
///   A(n,n)   = -2 / (h_{n-1} h_n)
///   A(k+1,k) =  2 / (h_k (h_k + h_{k+1}))
///   A(k,k+1) =  2 / (h_k (h_{k-1} + h_k))
TridiagonalOperator assemble_A(const Grid& grid);

struct WeightedNormContext {
    Vector weights;
    double p = 2.0; ///< in [1, inf]; use infinity() for the max norm

    static WeightedNormContext from_grid(const Grid& grid, double p = 2.0);
};

inline constexpr double kInfNorm = std::numeric_limits<double>::infinity();

/// [sum_k w_k |v_k|^p]^(1/p), or max_k |v_k| for p = inf.
double weighted_norm(std::span<const double> v, const WeightedNormContext& ctx);
double weighted_norm2(std::span<const double> v, std::span<const double> weights);

/// Solves (I - tau A) w = rhs by forward elimination / back substitution
/// without pivoting. I - tau A is strictly diagonally dominant for any A
/// built by assemble_A, so the pivots never vanish.
Vector solve_shifted(const TridiagonalOperator& a, double tau, std::span<const double> rhs);

/// Smallest entry of (I - tau A)^{-1}, formed column by column.
double resolvent_min_entry(const TridiagonalOperator& a, double tau);
/// min_i ((I - tau A)^{-1} c1)_i - c.
double resolvent_constant_margin(const TridiagonalOperator& a, double tau, double c);

inline constexpr double kNonnegativeSlack = 1e-13;

bool resolvent_is_nonnegative(const TridiagonalOperator& a, double tau);
bool resolvent_dominates_constant(const TridiagonalOperator& a, double tau, double c);

/// Largest eigenvalue of a symmetric tridiagonal matrix via Sturm-sequence
/// bisection. offdiag has length n-1.
double sturm_max_eigenvalue(std::span<const double> diag, std::span<const double> offdiag);

/// Weighted 2-logarithmic norm: the largest eigenvalue of
/// (S + S^T)/2 with S = H B H^{-1}, H = diag(sqrt(w_k)).
double log_norm_2(const TridiagonalOperator& b, std::span<const double> weights);
double log_norm_2(const DenseMatrix& b, std::span<const double> weights);

} // namespace qsplit
