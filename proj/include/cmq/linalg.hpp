#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "cmq/complex_matrix.hpp"
#include "cmq/errors.hpp"

namespace cmq {

/// Real symmetric tridiagonal matrix, stored by diagonals.
struct SymTridiag {
    std::vector<double> diag;     // length n
    std::vector<double> offdiag;  // length n-1

    std::size_t size() const { return diag.size(); }

    ComplexMatrix to_dense() const {
        const std::size_t n = size();
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = diag[i];
            if (i + 1 < n) {
                m(i, i + 1) = offdiag[i];
                m(i + 1, i) = offdiag[i];
            }
        }
        return m;
    }
};

/// sqrt(Tr(A^dag A)/N); the convergence metric used throughout.
inline double frob_norm_normalized(const ComplexMatrix& a) {
    if (!a.square())
        throw DimensionError("frob_norm_normalized: matrix must be square");
    double s = 0.0;
    for (const auto& v : a.data()) s += std::norm(v);
    return std::sqrt(s / static_cast<double>(a.rows()));
}

/// Largest singular value by power iteration on A^dag A with the
/// normalized all-ones start vector (deterministic).
inline double operator_norm(const ComplexMatrix& a, double tol = 1e-12,
                            std::size_t max_iters = 50000) {
    if (!a.square()) throw DimensionError("operator_norm: matrix must be square");
    const std::size_t n = a.rows();
    if (n == 0) return 0.0;
    if (a.frobenius() == 0.0) return 0.0;

    const ComplexMatrix adag = a.adjoint();
    std::vector<cxd> v(n, cxd(1.0 / std::sqrt(static_cast<double>(n)), 0.0));
    double sigma = 0.0;
    for (std::size_t it = 0; it < max_iters; ++it) {
        std::vector<cxd> av = a.apply(v);
        const double av_norm = vec_norm(av);
        const double sigma_new = av_norm;  // Rayleigh estimate sqrt(v^dag A^dag A v)
        std::vector<cxd> w = adag.apply(av);
        const double w_norm = vec_norm(w);
        if (w_norm == 0.0) return 0.0;
        for (auto& x : w) x /= w_norm;
        v = std::move(w);
        if (it > 0 && std::abs(sigma_new - sigma) <= tol * std::max(sigma_new, 1e-300)) {
            return sigma_new;
        }
        sigma = sigma_new;
    }
    throw IterationError("operator_norm: power iteration did not converge", sigma);
}

/// Matrix exponential by scaling-and-squaring with an order-18 Taylor
/// kernel; the scaled norm is kept at or below 1/2.
inline ComplexMatrix expm(const ComplexMatrix& a, double tol = 1e-13) {
    if (!a.square()) throw DimensionError("expm: matrix must be square");
    const std::size_t n = a.rows();
    const double norm = a.frobenius();

    int s = 0;
    double scaled = norm;
    while (scaled > 0.5) {
        scaled *= 0.5;
        ++s;
    }
    // theta = 1/2, order 18: truncation ~ theta^19/19! ~ 1.6e-24, far below
    // any tol we accept; the parameter only guards against absurd requests.
    (void)tol;

    ComplexMatrix t = a;
    const double inv = std::ldexp(1.0, -s);
    t *= cxd(inv, 0.0);

    ComplexMatrix result = ComplexMatrix::identity(n);
    ComplexMatrix term = ComplexMatrix::identity(n);
    for (int k = 1; k <= 18; ++k) {
        term = term * t;
        term *= cxd(1.0 / k, 0.0);
        result += term;
    }
    for (int k = 0; k < s; ++k) result = result * result;
    return result;
}

namespace detail {

inline double offdiag_mass(const ComplexMatrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) s += std::norm(a(i, j));
    return s;
}

}  // namespace detail

struct EigenResult {
    std::vector<double> values;   // ascending
    ComplexMatrix vectors;        // columns
};

/// Hermitian eigendecomposition by cyclic-by-rows Jacobi iteration.
/// Sweeps stop when the off-diagonal Frobenius mass falls below
/// (tol * ||A||_F)^2; residual ||AV - V Lambda|| <= tol * ||A||.
inline EigenResult hermitian_eigen(const ComplexMatrix& a_in, double tol = 1e-12) {
    if (!a_in.square()) throw DimensionError("hermitian_eigen: matrix must be square");
    const std::size_t n = a_in.rows();
    const double scale = a_in.frobenius();
    {
        ComplexMatrix dev = a_in - a_in.adjoint();
        if (dev.frobenius() > tol * std::max(scale, 1e-300) * 2.0 + 1e-300)
            throw SymmetryError("hermitian_eigen: input is not Hermitian within tolerance");
    }

    ComplexMatrix a = a_in;
    ComplexMatrix v = ComplexMatrix::identity(n);
    if (n == 0) return {{}, v};

    const double stop = std::pow(tol * std::max(scale, 1e-300), 2.0);
    const int max_sweeps = 60;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (detail::offdiag_mass(a) <= stop) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cxd g = a(p, q);
                const double gabs = std::abs(g);
                if (gabs <= 1e-300) continue;
                const cxd phase = g / gabs;  // g = |g| e^{i phi}
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double tau = (app - aqq) / (2.0 * gabs);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double sr = t * c;
                // Unitary J: J_pp = c, J_pq = -sr*phase, J_qp = sr*conj(phase), J_qq = c.
                const cxd jpq = -sr * phase;
                const cxd jqp = sr * std::conj(phase);
                // A <- J^dag A J : update columns p,q then rows p,q.
                for (std::size_t i = 0; i < n; ++i) {
                    const cxd aip = a(i, p), aiq = a(i, q);
                    a(i, p) = aip * c + aiq * jqp;
                    a(i, q) = aip * jpq + aiq * c;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    const cxd apj = a(p, j), aqj = a(q, j);
                    a(p, j) = c * apj + std::conj(jqp) * aqj;
                    a(q, j) = std::conj(jpq) * apj + c * aqj;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = cxd(a(p, p).real(), 0.0);
                a(q, q) = cxd(a(q, q).real(), 0.0);
                for (std::size_t i = 0; i < n; ++i) {
                    const cxd vip = v(i, p), viq = v(i, q);
                    v(i, p) = vip * c + viq * jqp;
                    v(i, q) = vip * jpq + viq * c;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

    EigenResult res;
    res.values.resize(n);
    res.vectors = ComplexMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        res.values[j] = a(order[j], order[j]).real();
        for (std::size_t i = 0; i < n; ++i) res.vectors(i, j) = v(i, order[j]);
    }
    return res;
}

namespace detail {

// Number of eigenvalues of T strictly below x (Sturm sequence count).
inline std::size_t sturm_count(const SymTridiag& t, double x) {
    const std::size_t n = t.size();
    std::size_t count = 0;
    double d = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double off2 = (i == 0) ? 0.0 : t.offdiag[i - 1] * t.offdiag[i - 1];
        d = t.diag[i] - x - off2 / d;
        if (d == 0.0) d = -1e-300;
        if (d < 0.0) ++count;
    }
    return count;
}

}  // namespace detail

/// All eigenvalues of a real symmetric tridiagonal matrix by Sturm-sequence
/// bisection, each to absolute accuracy tol; independent of the dense
/// Jacobi path by construction.
inline std::vector<double> tridiag_eigenvalues(const SymTridiag& t, double tol = 1e-12) {
    const std::size_t n = t.size();
    if (n == 0) return {};
    double lo = t.diag[0], hi = t.diag[0];
    for (std::size_t i = 0; i < n; ++i) {
        const double r = (i > 0 ? std::abs(t.offdiag[i - 1]) : 0.0) +
                         (i + 1 < n ? std::abs(t.offdiag[i]) : 0.0);
        lo = std::min(lo, t.diag[i] - r);
        hi = std::max(hi, t.diag[i] + r);
    }
    lo -= 1.0e-12 + 1e-12 * std::abs(lo);
    hi += 1.0e-12 + 1e-12 * std::abs(hi);

    std::vector<double> eig(n);
    for (std::size_t k = 1; k <= n; ++k) {
        double a = lo, b = hi;
        while (b - a > std::max(tol * 0.5, 4.0 * std::numeric_limits<double>::epsilon() *
                                               std::max(std::abs(a), std::abs(b)))) {
            const double mid = 0.5 * (a + b);
            if (detail::sturm_count(t, mid) >= k)
                b = mid;
            else
                a = mid;
        }
        eig[k - 1] = 0.5 * (a + b);
    }
    return eig;
}

/// Bessel function of the first kind, J_n(w), by Miller's backward
/// recurrence normalized with J_0 + 2 sum J_{2k} = 1.
/// Valid for 0 <= n <= 1e4 and |w| <= 1e4.
inline double bessel_j(int n, double w) {
    if (n < 0 || n > 10000) throw RangeError("bessel_j: order out of range");
    if (std::abs(w) > 10000.0) throw RangeError("bessel_j: argument out of range");
    const double sign = (w < 0.0 && (n % 2 == 1)) ? -1.0 : 1.0;
    const double x = std::abs(w);
    if (x == 0.0) return n == 0 ? 1.0 : 0.0;

    // Miller safety margin: start well above both the order and the argument.
    int m_start = n + 20 + static_cast<int>(std::ceil(x));
    m_start += 8 + static_cast<int>(2.0 * std::sqrt(static_cast<double>(m_start)));
    if (m_start % 2 == 1) ++m_start;

    double jp = 0.0;          // J_{k+1}
    double jc = 1e-300;       // J_k (arbitrary seed)
    double target = 0.0;
    double norm = 0.0;        // accumulates J_0 + 2*sum_{even k>0} J_k
    for (int k = m_start; k >= 0; --k) {
        const double jm = (2.0 * (k + 1)) / x * jc - jp;
        jp = jc;
        jc = jm;
        if (k == n) target = jc;
        if (k % 2 == 0) norm += (k == 0) ? jc : 2.0 * jc;
        if (std::abs(jc) > 1e250) {
            jc *= 1e-250;
            jp *= 1e-250;
            target *= 1e-250;
            norm *= 1e-250;
        }
    }
    return sign * target / norm;
}

}  // namespace cmq
