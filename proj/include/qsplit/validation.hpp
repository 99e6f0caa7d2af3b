#pragma once

// Dense, desk-scale utilities. They exist to check the tridiagonal machinery
// against independent routes and are never used on the solver hot path.

#include "qsplit/linalg.hpp"

#include <span>
#include <vector>

namespace qsplit {

inline constexpr int kDenseExpmMaxSize = 16;

/// exp(tB) by scaling and squaring of a truncated Taylor series. The
/// diagonal is shifted by its minimum first, so Metzler matrices (nonnegative
/// off-diagonal) are summed without cancellation and stay entrywise
/// nonnegative. Throws UnsupportedSize for N > 16.
DenseMatrix dense_expm(const DenseMatrix& b, double t);

struct SymmetricEigen {
    Vector values;        ///< ascending
    DenseMatrix vectors;  ///< column j belongs to values[j]
};

/// Cyclic Jacobi rotations; input must be symmetric.
SymmetricEigen jacobi_eigen(const DenseMatrix& s);

/// (H B H^{-1} + (H B H^{-1})^T) / 2 with H = diag(sqrt(w)).
DenseMatrix symmetrized(const DenseMatrix& b, std::span<const double> weights);

/// Estimates sup_v lim_{t->0+} (|(I+tB)v| - |v|) / (t |v|) in the weighted
/// 2-norm over the supplied trial vectors. Each quotient is evaluated on
/// t_sequence (decreasing, positive) and extrapolated to t = 0 with Neville's
/// scheme.
double log_norm_limit_probe(const DenseMatrix& b, std::span<const double> weights,
                            const std::vector<Vector>& trial_vectors,
                            std::span<const double> t_sequence);

/// Trial vectors for the probe: the maximizing direction of the symmetrized
/// matrix (Jacobi route, mapped back through H^{-1}) plus the unit vectors.
std::vector<Vector> probe_trial_vectors(const DenseMatrix& b, std::span<const double> weights);

/// Geometric t ladder starting at scale / max(1, |B|_inf).
Vector probe_t_sequence(const DenseMatrix& b, int count = 6, double scale = 1e-3);

} // namespace qsplit
