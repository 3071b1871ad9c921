#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "cmq/complex_matrix.hpp"
#include "cmq/errors.hpp"
#include "cmq/linalg.hpp"
#include "cmq/polynomial.hpp"
#include "cmq/report.hpp"

namespace cmq {

/// Internal basis index k = 0..N-1 corresponds to the momentum harmonic
/// psi_{k + kBasisOffset}; fixed here once so no off-by-one can drift.
inline constexpr int kBasisOffset = 1;

/// Bounded cylinder phase space: positions in (0, L], momenta on a circle
/// of circumference M, state space of dimension N = floor(L M / (2 pi hbar)).
struct CylinderPhaseSpace {
    double length;    // L
    double momentum;  // M
    double hbar;
    std::size_t dim;  // N

    static CylinderPhaseSpace from_hbar(double length, double momentum, double hbar) {
        if (length <= 0.0 || momentum <= 0.0 || hbar <= 0.0)
            throw ArgumentError("CylinderPhaseSpace: L, M, hbar must be positive");
        const auto n = static_cast<std::size_t>(std::floor(length * momentum / (kTwoPi * hbar)));
        if (n == 0) throw ArgumentError("CylinderPhaseSpace: no admissible states (hbar too large)");
        return {length, momentum, hbar, n};
    }

    /// Sweep parameterization: hbar at the upper end of its window, which
    /// makes x_k = k L / N exact.
    static CylinderPhaseSpace from_dim(double length, double momentum, std::size_t n) {
        if (length <= 0.0 || momentum <= 0.0 || n == 0)
            throw ArgumentError("CylinderPhaseSpace: L, M must be positive and N >= 1");
        const double hbar = length * momentum / (kTwoPi * static_cast<double>(n));
        return {length, momentum, hbar, n};
    }

    double dx() const { return kTwoPi * hbar / momentum; }

    /// Position eigenvalue of basis state k (internal 0-based index).
    double x_at(std::size_t k) const { return static_cast<double>(k + kBasisOffset) * dx(); }
};

/// Finite Laurent sum sum_n a_n(x) z^n over the cylinder.
class CylinderObservable {
public:
    CylinderObservable() = default;

    static CylinderObservable constant(cxd v) {
        CylinderObservable a;
        a.set_term(0, Polynomial::constant(v));
        return a;
    }

    static CylinderObservable position() {
        CylinderObservable a;
        a.set_term(0, Polynomial::x());
        return a;
    }

    static CylinderObservable z_power(int n) {
        CylinderObservable a;
        a.set_term(n, Polynomial::constant(cxd(1.0)));
        return a;
    }

    static CylinderObservable monomial(int n, Polynomial p) {
        CylinderObservable a;
        a.set_term(n, std::move(p));
        return a;
    }

    void set_term(int n, Polynomial p) {
        if (p.zero())
            terms_.erase(n);
        else
            terms_[n] = std::move(p);
    }

    const std::map<int, Polynomial>& terms() const { return terms_; }

    Polynomial term(int n) const {
        auto it = terms_.find(n);
        return it == terms_.end() ? Polynomial() : it->second;
    }

    int max_laurent_index() const {
        int m = 0;
        for (const auto& [n, p] : terms_) m = std::max(m, std::abs(n));
        return m;
    }

    CylinderObservable conj() const {
        CylinderObservable out;
        for (const auto& [n, p] : terms_) out.set_term(-n, p.conj());
        return out;
    }

    CylinderObservable& operator+=(const CylinderObservable& o) {
        for (const auto& [n, p] : o.terms_) set_term(n, term(n) + p);
        return *this;
    }

    CylinderObservable& operator-=(const CylinderObservable& o) {
        for (const auto& [n, p] : o.terms_) set_term(n, term(n) - p);
        return *this;
    }

    CylinderObservable& operator*=(cxd s) {
        for (auto it = terms_.begin(); it != terms_.end();) {
            it->second *= s;
            if (it->second.zero())
                it = terms_.erase(it);
            else
                ++it;
        }
        return *this;
    }

    friend CylinderObservable operator+(CylinderObservable a, const CylinderObservable& b) {
        return a += b;
    }
    friend CylinderObservable operator-(CylinderObservable a, const CylinderObservable& b) {
        return a -= b;
    }
    friend CylinderObservable operator*(cxd s, CylinderObservable a) { return a *= s; }

    friend CylinderObservable operator*(const CylinderObservable& a, const CylinderObservable& b) {
        CylinderObservable out;
        for (const auto& [n, p] : a.terms_)
            for (const auto& [m, q] : b.terms_) out.set_term(n + m, out.term(n + m) + p * q);
        return out;
    }

private:
    std::map<int, Polynomial> terms_;
};

// --- Operators ---------------------------------------------------------

/// x-hat: diagonal with x_k = k Delta x, k = 1..N.
inline ComplexMatrix position_operator(const CylinderPhaseSpace& ps) {
    ComplexMatrix m(ps.dim, ps.dim);
    for (std::size_t k = 0; k < ps.dim; ++k) m(k, k) = ps.x_at(k);
    return m;
}

/// z-hat^m: sends psi_n to psi_{n+m} when 1 <= n+m <= N, else to zero.
/// In column-vector convention this is the transpose of the textbook
/// upper-shift display; the action is what is fixed here.
inline ComplexMatrix shift_operator(const CylinderPhaseSpace& ps, int m) {
    ComplexMatrix mat(ps.dim, ps.dim);
    const auto n = static_cast<long long>(ps.dim);
    for (long long k = 0; k < n; ++k) {
        const long long target = k + m;
        if (target >= 0 && target < n) mat(static_cast<std::size_t>(target),
                                           static_cast<std::size_t>(k)) = 1.0;
    }
    return mat;
}

/// f(x-hat): diagonal evaluation.
inline ComplexMatrix position_polynomial_operator(const CylinderPhaseSpace& ps,
                                                  const Polynomial& f) {
    ComplexMatrix m(ps.dim, ps.dim);
    for (std::size_t k = 0; k < ps.dim; ++k) m(k, k) = f.eval(cxd(ps.x_at(k), 0.0));
    return m;
}

/// The half-shifted coefficient a_n^hbar(x) = a_n(x) + (a_n(x+n dx) - a_n(x))/2
/// appearing in the zx-ordered form of the quantization map.
inline Polynomial zx_coefficient(const Polynomial& an, int n, double dx) {
    Polynomial shifted = an.shifted(static_cast<double>(n) * dx);
    return cxd(0.5) * (an + shifted);
}

/// Q^R(a) = sum_n (a_n(x-hat) z-hat^n + z-hat^n a_n(x-hat)) / 2.
inline ComplexMatrix quantize(const CylinderPhaseSpace& ps, const CylinderObservable& a) {
    ComplexMatrix out(ps.dim, ps.dim);
    for (const auto& [n, an] : a.terms()) {
        const ComplexMatrix fx = position_polynomial_operator(ps, an);
        const ComplexMatrix zn = shift_operator(ps, n);
        out += cxd(0.5) * (fx * zn + zn * fx);
    }
    return out;
}

/// Same operator assembled through the zx-ordered route
/// sum_n z-hat^n a_n^hbar(x-hat); agrees with quantize() to roundoff.
inline ComplexMatrix quantize_zx(const CylinderPhaseSpace& ps, const CylinderObservable& a) {
    ComplexMatrix out(ps.dim, ps.dim);
    for (const auto& [n, an] : a.terms()) {
        const ComplexMatrix fx = position_polynomial_operator(ps, zx_coefficient(an, n, ps.dx()));
        out += shift_operator(ps, n) * fx;
    }
    return out;
}

// --- Classical norms and brackets --------------------------------------

/// ||a||^2 = (1/L) sum_n int_0^L |a_n(x)|^2 dx, exactly via antiderivatives.
inline double classical_l2_norm(const CylinderPhaseSpace& ps, const CylinderObservable& a) {
    double acc = 0.0;
    for (const auto& [n, p] : a.terms()) acc += p.integral_abs2(ps.length);
    return std::sqrt(acc / ps.length);
}

/// One-variable specialization of the R-norm: sum over terms of the
/// coefficient-magnitude sums weighted by R^degree.
inline double r_norm(const CylinderObservable& a, double radius) {
    if (radius <= 0.0) throw ArgumentError("r_norm: R must be positive");
    double acc = 0.0;
    for (const auto& [n, p] : a.terms()) acc += p.coeff_bound(radius);
    return acc;
}

/// {a, b} with the convention {f,g} = d_p f d_x g - d_x f d_p g (so {p,x}=1):
/// termwise {z^n a_n, z^m b_m} = z^{n+m} (2 pi i / M)(n a_n b_m' - m a_n' b_m).
inline CylinderObservable poisson_bracket(const CylinderObservable& a,
                                          const CylinderObservable& b, double momentum) {
    CylinderObservable out;
    const cxd factor(0.0, kTwoPi / momentum);
    for (const auto& [n, an] : a.terms()) {
        for (const auto& [m, bm] : b.terms()) {
            Polynomial p = cxd(double(n)) * (an * bm.derivative()) -
                           cxd(double(m)) * (an.derivative() * bm);
            p *= factor;
            if (!p.zero()) out.set_term(n + m, out.term(n + m) + p);
        }
    }
    return out;
}

// --- Exact Appendix bounds ----------------------------------------------

/// Integer count of basis states on which z^n z^m and z^{n+m} differ;
/// equals N * ||z^n z^m - z^{n+m}||_N^2 exactly.
inline long long zz_defect_count(long long n_dim, long long n, long long m) {
    long long count = 0;
    for (long long k = 1; k <= n_dim; ++k) {
        const bool in_total = (k + n + m >= 1) && (k + n + m <= n_dim);
        const bool in_first = (k + m >= 1) && (k + m <= n_dim);
        if (in_total && !in_first) ++count;
    }
    return count;
}

// --- Convergence studies -------------------------------------------------

/// ||Q^R(a)||_N^2 through the closed zx-ordered sum
/// (1/N) sum_n sum_k chi_N(k+n) |a_n^hbar(x_k)|^2; equal to the matrix
/// Frobenius route, without materializing matrices.
inline double quantum_norm_squared(const CylinderPhaseSpace& ps, const CylinderObservable& a) {
    const auto n_dim = static_cast<long long>(ps.dim);
    double acc = 0.0;
    for (const auto& [n, an] : a.terms()) {
        const Polynomial ah = zx_coefficient(an, n, ps.dx());
        for (long long k = 0; k < n_dim; ++k) {
            const long long shifted = k + kBasisOffset + n;
            if (shifted < 1 || shifted > n_dim) continue;
            acc += std::norm(ah.eval(cxd(ps.x_at(static_cast<std::size_t>(k)), 0.0)));
        }
    }
    return acc / static_cast<double>(n_dim);
}

/// Prop. 1(iii): rows (N, ||Q(a)||_N, ||a||_R-classical, residual).
inline ConvergenceReport check_separability(const CylinderObservable& a,
                                            const std::vector<std::size_t>& n_list,
                                            double length, double momentum) {
    if (n_list.empty()) throw ArgumentError("check_separability: empty N list");
    ConvergenceReport rep;
    rep.metadata["study"] = "cylinder-separability";
    for (std::size_t n : n_list) {
        const auto ps = CylinderPhaseSpace::from_dim(length, momentum, n);
        const double measured = std::sqrt(quantum_norm_squared(ps, a));
        const double reference = classical_l2_norm(ps, a);
        rep.add(static_cast<double>(n), measured, reference);
    }
    return rep;
}

/// Prop. 1(iv): rows (N, ||Q(a)Q(b) - Q(ab)||_N, 0, residual).
inline ConvergenceReport check_von_neumann(const CylinderObservable& a,
                                           const CylinderObservable& b,
                                           const std::vector<std::size_t>& n_list,
                                           double length, double momentum) {
    if (n_list.empty()) throw ArgumentError("check_von_neumann: empty N list");
    ConvergenceReport rep;
    rep.metadata["study"] = "cylinder-vonneumann";
    for (std::size_t n : n_list) {
        const auto ps = CylinderPhaseSpace::from_dim(length, momentum, n);
        const ComplexMatrix qa = quantize(ps, a);
        const ComplexMatrix qb = quantize(ps, b);
        const ComplexMatrix qab = quantize(ps, a * b);
        const double measured = frob_norm_normalized(qa * qb - qab);
        rep.add(static_cast<double>(n), measured, 0.0);
    }
    return rep;
}

/// Prop. 1(v): residual maximized over bulk basis states
/// psi_{l+1}..psi_{N-l}; rows (N, residual, 0, residual).
inline ConvergenceReport check_dirac(const CylinderObservable& a, const CylinderObservable& b,
                                     std::size_t bulk_margin,
                                     const std::vector<std::size_t>& n_list, double length,
                                     double momentum) {
    if (n_list.empty()) throw ArgumentError("check_dirac: empty N list");
    const int la = a.max_laurent_index();
    const int lb = b.max_laurent_index();
    if (static_cast<std::size_t>(std::max(la, lb)) > bulk_margin)
        throw ArgumentError("check_dirac: Laurent indices exceed the bulk margin l");
    for (std::size_t n : n_list)
        if (n <= 2 * bulk_margin)
            throw ArgumentError("check_dirac: bulk margin too large for the smallest N");

    ConvergenceReport rep;
    rep.metadata["study"] = "cylinder-dirac";
    for (std::size_t n : n_list) {
        const auto ps = CylinderPhaseSpace::from_dim(length, momentum, n);
        const ComplexMatrix qa = quantize(ps, a);
        const ComplexMatrix qb = quantize(ps, b);
        const ComplexMatrix qbr = quantize(ps, poisson_bracket(a, b, momentum));
        ComplexMatrix dev = commutator(qa, qb);
        dev *= cxd(0.0, -1.0 / ps.hbar);  // (i hbar)^{-1} [Qa, Qb]
        dev -= qbr;
        double worst = 0.0;
        for (std::size_t k = bulk_margin; k + bulk_margin < ps.dim; ++k) {
            double col = 0.0;
            for (std::size_t i = 0; i < ps.dim; ++i) col += std::norm(dev(i, k));
            worst = std::max(worst, std::sqrt(col));
        }
        rep.add(static_cast<double>(n), worst, 0.0);
    }
    return rep;
}

/// Decaying closed-form coefficient sequences for Prop. 2 states.
struct CoefficientSequence {
    enum class Kind { inverse_square, geometric } kind = Kind::inverse_square;
    double q = 0.5;  // ratio for the geometric sequence

    double at(long long k) const {
        switch (kind) {
            case Kind::geometric:
                return std::pow(q, static_cast<double>(std::llabs(k)));
            case Kind::inverse_square:
            default:
                return 1.0 / (1.0 + static_cast<double>(k) * static_cast<double>(k));
        }
    }
};

/// Prop. 2 on the interval [u, v]: for each N both limits are reported as
/// consecutive rows (product defect first, then the Dirac defect), using the
/// window basis psi_n with n in (uM/2pi hbar, vM/2pi hbar].
inline ConvergenceReport check_prop2(const CylinderObservable& a, const CylinderObservable& b,
                                     const CoefficientSequence& coeffs, double u, double v,
                                     double momentum, const std::vector<std::size_t>& n_list) {
    if (u == 0.0 || v == 0.0 || u >= v)
        throw ArgumentError("check_prop2: require u < v with u, v nonzero");
    if (n_list.empty()) throw ArgumentError("check_prop2: empty N list");

    ConvergenceReport rep;
    rep.metadata["study"] = "cylinder-prop2";
    rep.metadata["series"] = "rows alternate: product defect, dirac defect";
    for (std::size_t n : n_list) {
        const double hbar = (v - u) * momentum / (kTwoPi * static_cast<double>(n));
        const double dx = kTwoPi * hbar / momentum;
        const auto n1 = static_cast<long long>(std::floor(u * momentum / (kTwoPi * hbar)));
        const auto n2 = static_cast<long long>(std::floor(v * momentum / (kTwoPi * hbar)));
        const std::size_t dim = static_cast<std::size_t>(n2 - n1);
        if (dim == 0) throw ArgumentError("check_prop2: window too small at given N");

        // Operators in the window basis; absolute harmonic index n1+1+k.
        auto window_quantize = [&](const CylinderObservable& obs) {
            ComplexMatrix out(dim, dim);
            for (const auto& [ln, an] : obs.terms()) {
                const Polynomial ah = zx_coefficient(an, ln, dx);
                for (long long k = 0; k < static_cast<long long>(dim); ++k) {
                    const long long src = n1 + 1 + k;
                    const long long dst = src + ln;
                    if (dst < n1 + 1 || dst > n2) continue;
                    out(static_cast<std::size_t>(dst - n1 - 1), static_cast<std::size_t>(k)) +=
                        ah.eval(cxd(static_cast<double>(src) * dx, 0.0));
                }
            }
            return out;
        };

        const ComplexMatrix qa = window_quantize(a);
        const ComplexMatrix qb = window_quantize(b);
        const ComplexMatrix qab = window_quantize(a * b);
        const ComplexMatrix qbr = window_quantize(poisson_bracket(a, b, momentum));

        std::vector<cxd> psi(dim);
        for (std::size_t k = 0; k < dim; ++k) psi[k] = coeffs.at(n1 + 1 + static_cast<long long>(k));

        const std::vector<cxd> prod_defect = (qa * qb - qab).apply(psi);
        ComplexMatrix dirac = commutator(qa, qb);
        dirac *= cxd(0.0, -1.0 / hbar);
        dirac -= qbr;
        const std::vector<cxd> dirac_defect = dirac.apply(psi);

        rep.add(static_cast<double>(n), vec_norm(prod_defect), 0.0);
        rep.add(static_cast<double>(n), vec_norm(dirac_defect), 0.0);
    }
    return rep;
}

}  // namespace cmq
