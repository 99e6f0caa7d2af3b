#include "qsplit/linalg.hpp"

#include "qsplit/error.hpp"
#include "qsplit/validation.hpp"

#include <algorithm>
#include <cmath>

namespace qsplit {

DenseMatrix DenseMatrix::identity(int n) {
    DenseMatrix m(n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

Vector DenseMatrix::multiply(std::span<const double> v) const {
    require(static_cast<int>(v.size()) == n_, "DenseMatrix::multiply: dimension mismatch");
    Vector out(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n_; ++j) {
            acc += (*this)(i, j) * v[j];
        }
        out[i] = acc;
    }
    return out;
}

DenseMatrix DenseMatrix::multiply(const DenseMatrix& rhs) const {
    require(rhs.n_ == n_, "DenseMatrix::multiply: dimension mismatch");
    DenseMatrix out(n_);
    for (int i = 0; i < n_; ++i) {
        for (int k = 0; k < n_; ++k) {
            const double lhs = (*this)(i, k);
            if (lhs == 0.0) {
                continue;
            }
            for (int j = 0; j < n_; ++j) {
                out(i, j) += lhs * rhs(k, j);
            }
        }
    }
    return out;
}

double DenseMatrix::norm_inf() const {
    double best = 0.0;
    for (int i = 0; i < n_; ++i) {
        double row = 0.0;
        for (int j = 0; j < n_; ++j) {
            row += std::abs((*this)(i, j));
        }
        best = std::max(best, row);
    }
    return best;
}

TridiagonalOperator::TridiagonalOperator(Vector sub, Vector diag, Vector sup)
    : sub_(std::move(sub)), diag_(std::move(diag)), sup_(std::move(sup)) {
    require(!diag_.empty(), "TridiagonalOperator: empty diagonal");
    require(sub_.size() + 1 == diag_.size() && sup_.size() + 1 == diag_.size(),
            "TridiagonalOperator: off-diagonals must have length n-1");
}

void TridiagonalOperator::apply(std::span<const double> v, std::span<double> out) const {
    const std::size_t n = diag_.size();
    require(v.size() == n && out.size() == n, "TridiagonalOperator::apply: dimension mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        double acc = diag_[i] * v[i];
        if (i > 0) {
            acc += sub_[i - 1] * v[i - 1];
        }
        if (i + 1 < n) {
            acc += sup_[i] * v[i + 1];
        }
        out[i] = acc;
    }
}

Vector TridiagonalOperator::apply(std::span<const double> v) const {
    Vector out(diag_.size());
    apply(v, out);
    return out;
}

Vector TridiagonalOperator::row_sums() const {
    return apply(Vector(diag_.size(), 1.0));
}

DenseMatrix TridiagonalOperator::to_dense() const {
    const int n = size();
    DenseMatrix m(n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = diag_[i];
        if (i + 1 < n) {
            m(i + 1, i) = sub_[i];
            m(i, i + 1) = sup_[i];
        }
    }
    return m;
}

TridiagonalOperator assemble_A(const Grid& grid) {
    const int n = grid.interior_count();
    require(n >= 1, "assemble_A: grid has no interior nodes");
    auto h = grid.spacings();
    Vector diag(n), sub(n - 1), sup(n - 1);
    for (int row = 1; row <= n; ++row) {
        diag[row - 1] = -2.0 / (h[row - 1] * h[row]);
    }
    for (int k = 1; k <= n - 1; ++k) {
        sub[k - 1] = 2.0 / (h[k] * (h[k] + h[k + 1]));
        sup[k - 1] = 2.0 / (h[k] * (h[k - 1] + h[k]));
    }
    return TridiagonalOperator(std::move(sub), std::move(diag), std::move(sup));
}

WeightedNormContext WeightedNormContext::from_grid(const Grid& grid, double p) {
    auto w = grid.weights();
    return WeightedNormContext{Vector(w.begin(), w.end()), p};
}

double weighted_norm(std::span<const double> v, const WeightedNormContext& ctx) {
    require(v.size() == ctx.weights.size(), "weighted_norm: length mismatch");
    require(ctx.p >= 1.0, "weighted_norm: p must be in [1, inf]");
    if (std::isinf(ctx.p)) {
        double m = 0.0;
        for (double x : v) {
            m = std::max(m, std::abs(x));
        }
        return m;
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        require(ctx.weights[k] > 0.0, "weighted_norm: weights must be positive");
        acc += ctx.weights[k] * std::pow(std::abs(v[k]), ctx.p);
    }
    return ctx.p == 2.0 ? std::sqrt(acc) : std::pow(acc, 1.0 / ctx.p);
}

double weighted_norm2(std::span<const double> v, std::span<const double> weights) {
    require(v.size() == weights.size(), "weighted_norm: length mismatch");
    double acc = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        acc += weights[k] * v[k] * v[k];
    }
    return std::sqrt(acc);
}

Vector solve_shifted(const TridiagonalOperator& a, double tau, std::span<const double> rhs) {
    require(std::isfinite(tau) && tau >= 0.0, "solve_shifted: tau must be a nonnegative finite number");
    const std::size_t n = static_cast<std::size_t>(a.size());
    require(rhs.size() == n, "solve_shifted: dimension mismatch");
    Vector x(rhs.begin(), rhs.end());
    if (tau == 0.0) {
        return x;
    }
    auto lo = a.sub();
    auto d = a.diag();
    auto up = a.sup();
    Vector cprime(n);
    double pivot = 1.0 - tau * d[0];
    cprime[0] = n > 1 ? (-tau * up[0]) / pivot : 0.0;
    x[0] /= pivot;
    for (std::size_t i = 1; i < n; ++i) {
        const double l = -tau * lo[i - 1];
        pivot = (1.0 - tau * d[i]) - l * cprime[i - 1];
        cprime[i] = i + 1 < n ? (-tau * up[i]) / pivot : 0.0;
        x[i] = (x[i] - l * x[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        x[i] -= cprime[i] * x[i + 1];
    }
    return x;
}

double resolvent_min_entry(const TridiagonalOperator& a, double tau) {
    const int n = a.size();
    double worst = std::numeric_limits<double>::infinity();
    Vector e(n, 0.0);
    for (int j = 0; j < n; ++j) {
        e[j] = 1.0;
        for (double v : solve_shifted(a, tau, e)) {
            worst = std::isnan(v) ? -std::numeric_limits<double>::infinity() : std::min(worst, v);
        }
        e[j] = 0.0;
    }
    return worst;
}

double resolvent_constant_margin(const TridiagonalOperator& a, double tau, double c) {
    require(c >= 0.0, "resolvent_dominates_constant: c must be nonnegative");
    Vector rhs(a.size(), c);
    double worst = std::numeric_limits<double>::infinity();
    for (double v : solve_shifted(a, tau, rhs)) {
        worst = std::isnan(v) ? -std::numeric_limits<double>::infinity() : std::min(worst, v - c);
    }
    return worst;
}

bool resolvent_is_nonnegative(const TridiagonalOperator& a, double tau) {
    return resolvent_min_entry(a, tau) >= -kNonnegativeSlack;
}

bool resolvent_dominates_constant(const TridiagonalOperator& a, double tau, double c) {
    return resolvent_constant_margin(a, tau, c) >= -kNonnegativeSlack;
}

namespace {

// Number of eigenvalues strictly below x (LDL^T inertia of T - xI).
int sturm_count(std::span<const double> d, std::span<const double> e, double x, double pivmin) {
    int count = 0;
    double q = d[0] - x;
    if (std::abs(q) < pivmin) {
        q = -pivmin;
    }
    if (q < 0.0) {
        ++count;
    }
    for (std::size_t i = 1; i < d.size(); ++i) {
        q = d[i] - x - e[i - 1] * e[i - 1] / q;
        if (std::abs(q) < pivmin) {
            q = -pivmin;
        }
        if (q < 0.0) {
            ++count;
        }
    }
    return count;
}

} // namespace

double sturm_max_eigenvalue(std::span<const double> diag, std::span<const double> offdiag) {
    const std::size_t n = diag.size();
    require(n >= 1 && offdiag.size() + 1 == n, "sturm_max_eigenvalue: inconsistent sizes");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    double emax2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) {
            r += std::abs(offdiag[i - 1]);
        }
        if (i + 1 < n) {
            r += std::abs(offdiag[i]);
            emax2 = std::max(emax2, offdiag[i] * offdiag[i]);
        }
        lo = std::min(lo, diag[i] - r);
        hi = std::max(hi, diag[i] + r);
    }
    if (lo == hi) {
        return hi;
    }
    const double eps = std::numeric_limits<double>::epsilon();
    const double pivmin = std::numeric_limits<double>::min() * std::max(1.0, emax2);
    const double scale = std::max(std::abs(lo), std::abs(hi));
    hi += 4.0 * eps * scale;
    lo -= 4.0 * eps * scale;
    const int total = static_cast<int>(n);
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (sturm_count(diag, offdiag, mid, pivmin) == total) {
            hi = mid;
        } else {
            lo = mid;
        }
        if (hi - lo <= 2.0 * eps * std::max(std::abs(lo), std::abs(hi))) {
            break;
        }
    }
    return 0.5 * (lo + hi);
}

double log_norm_2(const TridiagonalOperator& b, std::span<const double> weights) {
    const int n = b.size();
    require(static_cast<int>(weights.size()) == n, "log_norm_2: weights length mismatch");
    Vector root(n);
    for (int i = 0; i < n; ++i) {
        require(weights[i] > 0.0, "log_norm_2: weights must be positive");
        root[i] = std::sqrt(weights[i]);
    }
    Vector d(b.diag().begin(), b.diag().end());
    Vector e(n - 1);
    for (int i = 0; i + 1 < n; ++i) {
        // (H B H^-1)(i,i+1) = r_i B(i,i+1) / r_{i+1}; the (i+1,i) entry mirrors it.
        e[i] = 0.5 * (root[i] * b.sup()[i] / root[i + 1] + root[i + 1] * b.sub()[i] / root[i]);
    }
    return sturm_max_eigenvalue(d, e);
}

double log_norm_2(const DenseMatrix& b, std::span<const double> weights) {
    const int n = b.size();
    require(n >= 1, "log_norm_2: empty matrix");
    require(static_cast<int>(weights.size()) == n, "log_norm_2: weights length mismatch");
    for (double w : weights) {
        require(w > 0.0, "log_norm_2: weights must be positive");
    }
    DenseMatrix s = symmetrized(b, weights);
    bool tridiagonal = true;
    for (int i = 0; i < n && tridiagonal; ++i) {
        for (int j = 0; j < n; ++j) {
            if (std::abs(i - j) > 1 && s(i, j) != 0.0) {
                tridiagonal = false;
                break;
            }
        }
    }
    if (tridiagonal) {
        Vector d(n), e(n > 0 ? n - 1 : 0);
        for (int i = 0; i < n; ++i) {
            d[i] = s(i, i);
            if (i + 1 < n) {
                e[i] = s(i, i + 1);
            }
        }
        return sturm_max_eigenvalue(d, e);
    }
    return jacobi_eigen(s).values.back();
}

} // namespace qsplit
