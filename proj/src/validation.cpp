#include "qsplit/validation.hpp"

#include "qsplit/error.hpp"

#include <algorithm>
#include <cmath>

namespace qsplit {

DenseMatrix dense_expm(const DenseMatrix& b, double t) {
    const int n = b.size();
    if (n > kDenseExpmMaxSize) {
        fail(ErrorCode::UnsupportedSize,
             "dense_expm: N = " + std::to_string(n) + " exceeds the validation limit of 16");
    }
    require(n >= 1, "dense_expm: empty matrix");
    require(std::isfinite(t) && t >= 0.0, "dense_expm: t must be nonnegative");
    if (t == 0.0) {
        return DenseMatrix::identity(n);
    }

    double shift = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        shift = std::min(shift, t * b(i, i));
    }
    DenseMatrix c(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            c(i, j) = t * b(i, j);
        }
        c(i, i) -= shift;
    }

    const double norm = c.norm_inf();
    int squarings = 0;
    if (norm > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    }
    const double scale = std::ldexp(1.0, -squarings);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            c(i, j) *= scale;
        }
    }

    DenseMatrix sum = DenseMatrix::identity(n);
    DenseMatrix term = DenseMatrix::identity(n);
    for (int k = 1; k <= 40; ++k) {
        term = term.multiply(c);
        const double inv_k = 1.0 / k;
        double term_norm = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                term(i, j) *= inv_k;
                sum(i, j) += term(i, j);
            }
        }
        term_norm = term.norm_inf();
        if (term_norm <= 1e-18 * sum.norm_inf()) {
            break;
        }
    }
    const double factor = std::exp(shift * scale);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            sum(i, j) *= factor;
        }
    }
    for (int s = 0; s < squarings; ++s) {
        sum = sum.multiply(sum);
    }
    return sum;
}

SymmetricEigen jacobi_eigen(const DenseMatrix& s) {
    const int n = s.size();
    DenseMatrix a = s;
    DenseMatrix v = DenseMatrix::identity(n);

    auto off_norm = [&] {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i != j) {
                    acc += a(i, j) * a(i, j);
                }
            }
        }
        return std::sqrt(acc);
    };
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            total += s(i, j) * s(i, j);
        }
    }
    total = std::sqrt(total);

    for (int sweep = 0; sweep < 100; ++sweep) {
        if (off_norm() <= 1e-15 * total) {
            break;
        }
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) {
                    continue;
                }
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - sn * akq;
                    a(k, q) = sn * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - sn * aqk;
                    a(q, k) = sn * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - sn * vkq;
                    v(k, q) = sn * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](int l, int r) { return a(l, l) < a(r, r); });
    SymmetricEigen out{Vector(n), DenseMatrix(n)};
    for (int j = 0; j < n; ++j) {
        out.values[j] = a(order[j], order[j]);
        for (int i = 0; i < n; ++i) {
            out.vectors(i, j) = v(i, order[j]);
        }
    }
    return out;
}

DenseMatrix symmetrized(const DenseMatrix& b, std::span<const double> weights) {
    const int n = b.size();
    require(static_cast<int>(weights.size()) == n, "symmetrized: weights length mismatch");
    DenseMatrix s(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double ri = std::sqrt(weights[i]);
            const double rj = std::sqrt(weights[j]);
            s(i, j) = 0.5 * (ri * b(i, j) / rj + rj * b(j, i) / ri);
        }
    }
    return s;
}

double log_norm_limit_probe(const DenseMatrix& b, std::span<const double> weights,
                            const std::vector<Vector>& trial_vectors,
                            std::span<const double> t_sequence) {
    const int n = b.size();
    require(static_cast<int>(weights.size()) == n, "log_norm_limit_probe: weights length mismatch");
    require(!trial_vectors.empty(), "log_norm_limit_probe: empty trial set");
    require(!t_sequence.empty(), "log_norm_limit_probe: empty t sequence");
    for (std::size_t i = 0; i < t_sequence.size(); ++i) {
        require(t_sequence[i] > 0.0, "log_norm_limit_probe: t values must be positive");
        require(i == 0 || t_sequence[i] < t_sequence[i - 1], "log_norm_limit_probe: t values must decrease");
    }

    double best = -std::numeric_limits<double>::infinity();
    Vector shifted(n);
    Vector table(t_sequence.size());
    for (const Vector& v : trial_vectors) {
        require(static_cast<int>(v.size()) == n, "log_norm_limit_probe: trial vector length mismatch");
        const double nv = weighted_norm2(v, weights);
        require(nv > 0.0, "log_norm_limit_probe: trial vectors must be nonzero");
        const Vector bv = b.multiply(v);
        for (std::size_t j = 0; j < t_sequence.size(); ++j) {
            const double t = t_sequence[j];
            // |v + tBv|^2 - |v|^2 expanded so the difference is never formed by cancellation.
            double growth = 0.0;
            for (int k = 0; k < n; ++k) {
                growth += weights[k] * (2.0 * v[k] * bv[k] + t * bv[k] * bv[k]);
                shifted[k] = v[k] + t * bv[k];
            }
            const double ns = weighted_norm2(shifted, weights);
            table[j] = growth / (nv * (ns + nv));
        }
        // Neville extrapolation to t = 0.
        const std::size_t m = t_sequence.size();
        for (std::size_t level = 1; level < m; ++level) {
            for (std::size_t i = 0; i + level < m; ++i) {
                const double ti = t_sequence[i];
                const double tj = t_sequence[i + level];
                table[i] = (ti * table[i + 1] - tj * table[i]) / (ti - tj);
            }
        }
        best = std::max(best, table[0]);
    }
    return best;
}

std::vector<Vector> probe_trial_vectors(const DenseMatrix& b, std::span<const double> weights) {
    const int n = b.size();
    SymmetricEigen eig = jacobi_eigen(symmetrized(b, weights));
    std::vector<Vector> out;
    Vector top(n);
    for (int i = 0; i < n; ++i) {
        top[i] = eig.vectors(i, n - 1) / std::sqrt(weights[i]);
    }
    out.push_back(std::move(top));
    for (int i = 0; i < n; ++i) {
        Vector e(n, 0.0);
        e[i] = 1.0;
        out.push_back(std::move(e));
    }
    return out;
}

Vector probe_t_sequence(const DenseMatrix& b, int count, double scale) {
    require(count >= 1, "probe_t_sequence: count must be positive");
    Vector out(count);
    double t = scale / std::max(1.0, b.norm_inf());
    for (int i = 0; i < count; ++i) {
        out[i] = t;
        t *= 0.5;
    }
    return out;
}

} // namespace qsplit
