#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cmq/complex_matrix.hpp"
#include "cmq/errors.hpp"
#include "cmq/linalg.hpp"
#include "cmq/report.hpp"
#include "cmq/su2.hpp"
#include "cmq/trivariate.hpp"

namespace cmq {

/// Polynomial in the commuting pair (C, x3), the diagonal coordinates of
/// the weight lattice. Domain-defining polynomials are of this kind; they
/// quantize to commuting diagonal operators, so eigenspace selection is an
/// exact pointwise evaluation.
///
/// Coefficients may alternatively be given in exact doubled-hbar units, in
/// which case the positivity test runs in integer arithmetic:
///   ball(s2):  R^2 - C with R^2 = hbar^2 s(s+1), rows j <= s kept;
///   above(m2): x3 - h with h = hbar m2/2, weights 2m > m2 kept.
class DiagonalPoly {
public:
    enum class Exact { none, ball_s2, above_m2 };

    DiagonalPoly() = default;

    /// grid[i][k] = coefficient of C^i x3^k.
    explicit DiagonalPoly(std::vector<std::vector<double>> grid) : grid_(std::move(grid)) {}

    static DiagonalPoly zero() { return DiagonalPoly(); }

    static DiagonalPoly constant(double c) {
        return DiagonalPoly(std::vector<std::vector<double>>{{c}});
    }

    static DiagonalPoly exact_ball(long long s2) {
        DiagonalPoly p;
        p.exact_ = Exact::ball_s2;
        p.param_ = s2;
        return p;
    }

    static DiagonalPoly exact_above(long long m2) {
        DiagonalPoly p;
        p.exact_ = Exact::above_m2;
        p.param_ = m2;
        return p;
    }

    /// R^2 - C.
    static DiagonalPoly ball(double radius) {
        return DiagonalPoly({{radius * radius}, {-1.0}});
    }

    /// x3 - h.
    static DiagonalPoly above_plane(double h) { return DiagonalPoly({{-h, 1.0}}); }

    /// R^2 - C - 2 z x3 - z^2: the ball of radius R centered at (0,0,-z).
    static DiagonalPoly shifted_ball(double radius, double z) {
        return DiagonalPoly({{radius * radius - z * z, -2.0 * z}, {-1.0}});
    }

    Exact exact_kind() const { return exact_; }
    long long exact_param() const { return param_; }
    bool is_exact() const { return exact_ != Exact::none; }

    double eval(double c, double x3) const {
        double acc = 0.0;
        double cp = 1.0;
        for (const auto& row : grid_) {
            double xp = 1.0;
            double rowacc = 0.0;
            for (double coeff : row) {
                rowacc += coeff * xp;
                xp *= x3;
            }
            acc += rowacc * cp;
            cp *= c;
        }
        return acc;
    }

    /// Magnitude scale for the relative strictness guard.
    double abs_scale(double c, double x3) const {
        double acc = 0.0;
        double cp = 1.0;
        const double ca = std::abs(c), xa = std::abs(x3);
        for (const auto& row : grid_) {
            double xp = 1.0;
            for (double coeff : row) {
                acc += std::abs(coeff) * xp * cp;
                xp *= xa;
            }
            cp *= ca;
        }
        return std::max(acc, 1e-300);
    }

    /// Strict positivity at the weight-lattice point of (2j, 2m); states
    /// within the 1e-9 relative band around zero are excluded.
    bool positive_at(int two_j, int two_m, double hbar) const {
        if (exact_ == Exact::ball_s2)
            return static_cast<long long>(two_j) * (two_j + 2) <= param_ * (param_ + 2);
        if (exact_ == Exact::above_m2) return two_m > param_;
        const double c = hbar * hbar * 0.25 * double(two_j) * (two_j + 2);
        const double x3 = hbar * 0.5 * double(two_m);
        return eval(c, x3) > 1e-9 * abs_scale(c, x3);
    }

    /// Eigenvalue of the quantized polynomial on the (2j, 2m) state.
    double value_at(int two_j, int two_m, double hbar) const {
        const double c = hbar * hbar * 0.25 * double(two_j) * (two_j + 2);
        const double x3 = hbar * 0.5 * double(two_m);
        if (exact_ == Exact::ball_s2)
            return hbar * hbar * 0.25 * double(param_) * (param_ + 2) - c;
        if (exact_ == Exact::above_m2) return x3 - hbar * 0.5 * double(param_);
        return eval(c, x3);
    }

    /// Positivity for the domain shrunk inward by hbar*t in (sqrt(C), x3):
    /// the defining polynomial is evaluated at the worst point of the
    /// radius-hbar*t disk around the lattice point. Exact for polynomials
    /// affine in C and x3 (the extremal directions lie on the grid axes).
    bool positive_at_shrunk(int two_j, int two_m, double hbar, double t) const {
        if (t == 0.0) return positive_at(two_j, two_m, hbar);
        if (exact_ == Exact::ball_s2 || exact_ == Exact::above_m2) {
            const double two_t = 2.0 * t;
            const auto tt = static_cast<long long>(std::llround(two_t));
            if (std::abs(two_t - double(tt)) > 1e-9)
                throw ArgumentError("DiagonalPoly: exact-units shrink needs half-integer t");
            if (exact_ == Exact::ball_s2)
                return static_cast<long long>(two_j) * (two_j + 2) <=
                       (param_ - tt) * (param_ - tt + 2);
            return two_m > param_ + tt;
        }
        const double rho = hbar * 0.5 * std::sqrt(double(two_j) * (two_j + 2));
        const double x3 = hbar * 0.5 * double(two_m);
        const double r = hbar * t;
        double worst = eval(rho * rho, x3);
        double worst_scale = abs_scale(rho * rho, x3);
        constexpr int kDirections = 64;
        for (int k = 0; k < kDirections; ++k) {
            const double phi = kTwoPi * double(k) / kDirections;
            const double rp = rho + r * std::cos(phi);
            const double xp = x3 + r * std::sin(phi);
            const double val = eval(rp * rp, xp);
            if (val < worst) {
                worst = val;
                worst_scale = abs_scale(rp * rp, xp);
            }
        }
        return worst > 1e-9 * worst_scale;
    }

    /// Grid product; exact-unit polynomials are not composable this way.
    friend DiagonalPoly operator*(const DiagonalPoly& a, const DiagonalPoly& b) {
        if (a.is_exact() || b.is_exact())
            throw ArgumentError("DiagonalPoly: products need grid-form polynomials");
        if (a.grid_.empty() || b.grid_.empty()) return DiagonalPoly::zero();
        std::size_t acols = 0, bcols = 0;
        for (const auto& r : a.grid_) acols = std::max(acols, r.size());
        for (const auto& r : b.grid_) bcols = std::max(bcols, r.size());
        std::vector<std::vector<double>> out(a.grid_.size() + b.grid_.size() - 1,
                                             std::vector<double>(acols + bcols - 1, 0.0));
        for (std::size_t i = 0; i < a.grid_.size(); ++i)
            for (std::size_t k = 0; k < a.grid_[i].size(); ++k)
                for (std::size_t i2 = 0; i2 < b.grid_.size(); ++i2)
                    for (std::size_t k2 = 0; k2 < b.grid_[i2].size(); ++k2)
                        out[i + i2][k + k2] += a.grid_[i][k] * b.grid_[i2][k2];
        return DiagonalPoly(std::move(out));
    }

    /// Expansion in (x1, x2, x3); exact-unit polynomials need the working
    /// hbar to fix their coefficients.
    TriPoly as_tripoly(double hbar) const {
        if (exact_ == Exact::ball_s2) {
            const double r2 = hbar * hbar * 0.25 * double(param_) * (param_ + 2);
            TriPoly p = TriPoly::constant(r2);
            p -= TriPoly::casimir();
            return p;
        }
        if (exact_ == Exact::above_m2) {
            TriPoly p = TriPoly::coordinate(3);
            p -= TriPoly::constant(hbar * 0.5 * double(param_));
            return p;
        }
        TriPoly out;
        TriPoly cpow = TriPoly::constant(1.0);
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            for (std::size_t k = 0; k < grid_[i].size(); ++k) {
                if (grid_[i][k] == 0.0) continue;
                TriPoly term = cpow;
                for (std::size_t kk = 0; kk < k; ++kk) term = term * TriPoly::coordinate(3);
                term *= grid_[i][k];
                out += term;
            }
            cpow = cpow * TriPoly::casimir();
        }
        return out;
    }

private:
    std::vector<std::vector<double>> grid_;
    Exact exact_ = Exact::none;
    long long param_ = 0;
};

/// Observable on su(2)^*: either diagonal kind (a polynomial in (C, x3),
/// acting diagonally in the weight basis) or general kind (a polynomial in
/// x1, x2, x3 quantized by full symmetric ordering).
struct DomainPolynomial {
    enum class Kind { diagonal, general };
    Kind kind = Kind::general;
    DiagonalPoly diag;
    TriPoly gen;

    static DomainPolynomial diagonal(DiagonalPoly p) {
        DomainPolynomial d;
        d.kind = Kind::diagonal;
        d.diag = std::move(p);
        return d;
    }

    static DomainPolynomial general(TriPoly p) {
        DomainPolynomial d;
        d.kind = Kind::general;
        d.gen = std::move(p);
        return d;
    }

    TriPoly as_tripoly(double hbar) const {
        return kind == Kind::diagonal ? diag.as_tripoly(hbar) : gen;
    }

    int degree(double hbar = 1.0) const { return as_tripoly(hbar).degree(); }
};

/// Union of basic domains, each defined by a list of diagonal-kind
/// polynomials. Diagonal kind makes the defining operators commute, which
/// is the quantizability condition, and makes any two components
/// automatically compatible.
struct SemialgebraicDomain {
    struct Component {
        std::vector<DiagonalPoly> polys;
    };
    std::vector<Component> components;

    static SemialgebraicDomain basic(std::vector<DiagonalPoly> polys) {
        SemialgebraicDomain d;
        d.components.push_back({std::move(polys)});
        return d;
    }

    /// Builds a basic domain from observables, enforcing the quantizability
    /// condition: general-kind defining polynomials do not commute after
    /// quantization and are rejected.
    static SemialgebraicDomain from_polynomials(const std::vector<DomainPolynomial>& polys);

    static SemialgebraicDomain ball(double radius) {
        return basic({DiagonalPoly::ball(radius)});
    }

    static SemialgebraicDomain cap(double radius, double h) {
        return basic({DiagonalPoly::ball(radius), DiagonalPoly::above_plane(h)});
    }

    static SemialgebraicDomain cap_exact(long long s2, long long m2) {
        return basic({DiagonalPoly::exact_ball(s2), DiagonalPoly::exact_above(m2)});
    }

    static SemialgebraicDomain unite(const SemialgebraicDomain& a, const SemialgebraicDomain& b) {
        SemialgebraicDomain d = a;
        d.components.insert(d.components.end(), b.components.begin(), b.components.end());
        return d;
    }

    static SemialgebraicDomain intersect(const SemialgebraicDomain& a,
                                         const SemialgebraicDomain& b) {
        // Distributes the intersection over both unions.
        SemialgebraicDomain d;
        for (const auto& ca : a.components)
            for (const auto& cb : b.components) {
                Component c = ca;
                c.polys.insert(c.polys.end(), cb.polys.begin(), cb.polys.end());
                d.components.push_back(std::move(c));
            }
        return d;
    }

    bool has_exact_polys() const {
        for (const auto& c : components)
            for (const auto& p : c.polys)
                if (p.is_exact()) return true;
        return false;
    }

    /// Numerical bounding radius: largest C at which some component is
    /// still feasible, scanned over a geometric grid. Works for any
    /// diagonal defining set; unbounded-looking domains are rejected.
    double bounding_radius(double hbar_for_exact = 1.0) const {
        double cmax_feasible = -1.0;
        const double cap_limit = 1e8;
        for (int e = -120; e <= 60; ++e) {
            for (int q = 0; q < 4; ++q) {
                const double c = std::ldexp(1.0 + 0.25 * q, e / 2);
                if (c > cap_limit) break;
                if (component_feasible_at(c, hbar_for_exact)) cmax_feasible = c;
            }
        }
        if (cmax_feasible < 0.0) return 0.0;
        if (cmax_feasible > 0.5 * cap_limit)
            throw ArgumentError("SemialgebraicDomain: domain appears unbounded");
        return 1.05 * std::sqrt(cmax_feasible);
    }

private:
    bool component_feasible_at(double c, double hbar_for_exact) const {
        const double rho = std::sqrt(c);
        for (const auto& comp : components) {
            for (int g = 0; g <= 64; ++g) {
                const double x3 = -rho + 2.0 * rho * double(g) / 64.0;
                bool ok = true;
                for (const auto& p : comp.polys) {
                    double val;
                    if (p.exact_kind() == DiagonalPoly::Exact::ball_s2) {
                        const double s = 0.5 * double(p.exact_param());
                        val = hbar_for_exact * hbar_for_exact * s * (s + 1.0) - c;
                    } else if (p.exact_kind() == DiagonalPoly::Exact::above_m2) {
                        val = x3 - hbar_for_exact * 0.5 * double(p.exact_param());
                    } else {
                        val = p.eval(c, x3);
                    }
                    if (val <= 0.0) {
                        ok = false;
                        break;
                    }
                }
                if (ok) return true;
            }
        }
        return false;
    }
};

inline SemialgebraicDomain SemialgebraicDomain::from_polynomials(
    const std::vector<DomainPolynomial>& polys) {
    std::vector<DiagonalPoly> diag;
    for (const auto& p : polys) {
        if (p.kind != DomainPolynomial::Kind::diagonal)
            throw QuantizabilityError(
                "SemialgebraicDomain: general-kind defining polynomial is not quantizable");
        diag.push_back(p.diag);
    }
    return basic(std::move(diag));
}

/// Joint eigenspace of the quantized defining polynomials with strictly
/// positive eigenvalues; the mask is over (2j, weight index), constant in
/// the column index.
class DomainEigenspace {
public:
    DomainEigenspace(int two_j_max, double hbar)
        : two_j_max_(two_j_max), hbar_(hbar), sel_(two_j_max + 1) {
        for (int u = 0; u <= two_j_max; ++u) sel_[u].assign(u + 1, 0);
    }

    int two_j_max() const { return two_j_max_; }
    double hbar() const { return hbar_; }

    bool selected(int two_j, int two_m) const {
        if (two_j < 0 || two_j > two_j_max_ || std::abs(two_m) > two_j) return false;
        if (((two_m ^ two_j) & 1) != 0) return false;
        return sel_[two_j][(two_m + two_j) / 2] != 0;
    }

    bool selected_state(const WeightState& s) const { return selected(s.two_j, s.two_m); }

    void set(int two_j, int two_m, bool v) { sel_[two_j][(two_m + two_j) / 2] = v ? 1 : 0; }

    /// Selected weight indices of block 2j, ascending.
    std::vector<int> selected_rows(int two_j) const {
        std::vector<int> out;
        if (two_j > two_j_max_) return out;
        for (int mi = 0; mi <= two_j; ++mi)
            if (sel_[two_j][mi]) out.push_back(mi);
        return out;
    }

    /// Total dimension including the 2j+1 column multiplicity.
    long long dimension() const {
        long long n = 0;
        for (int u = 0; u <= two_j_max_; ++u)
            n += static_cast<long long>(u + 1) *
                 std::count(sel_[u].begin(), sel_[u].end(), char(1));
        return n;
    }

    int max_selected_two_j() const {
        for (int u = two_j_max_; u >= 0; --u)
            if (std::any_of(sel_[u].begin(), sel_[u].end(), [](char c) { return c != 0; }))
                return u;
        return -1;
    }

    bool subset_of(const DomainEigenspace& other) const {
        for (int u = 0; u <= two_j_max_; ++u)
            for (int mi = 0; mi <= u; ++mi)
                if (sel_[u][mi] && !(u <= other.two_j_max_ && other.sel_[u][mi])) return false;
        return true;
    }

    bool same_mask(const DomainEigenspace& other) const {
        return subset_of(other) && other.subset_of(*this);
    }

    bool orthogonal_to(const DomainEigenspace& other) const {
        for (int u = 0; u <= std::min(two_j_max_, other.two_j_max_); ++u)
            for (int mi = 0; mi <= u; ++mi)
                if (sel_[u][mi] && other.sel_[u][mi]) return false;
        return true;
    }

    DomainEigenspace intersect(const DomainEigenspace& other) const {
        DomainEigenspace out(std::min(two_j_max_, other.two_j_max_), hbar_);
        for (int u = 0; u <= out.two_j_max_; ++u)
            for (int mi = 0; mi <= u; ++mi) out.sel_[u][mi] = sel_[u][mi] && other.sel_[u][mi];
        return out;
    }

    DomainEigenspace unite(const DomainEigenspace& other) const {
        DomainEigenspace out(std::max(two_j_max_, other.two_j_max_), hbar_);
        for (int u = 0; u <= out.two_j_max_; ++u)
            for (int mi = 0; mi <= u; ++mi) {
                const bool a = u <= two_j_max_ && sel_[u][mi];
                const bool b = u <= other.two_j_max_ && other.sel_[u][mi];
                out.sel_[u][mi] = a || b;
            }
        return out;
    }

private:
    int two_j_max_;
    double hbar_;
    std::vector<std::vector<char>> sel_;
};

/// Evaluates every defining polynomial at (C -> hbar^2 j(j+1), x3 -> hbar m)
/// and keeps the strictly positive joint eigenstates; a union keeps states
/// positive in at least one component.
inline DomainEigenspace domain_eigenspace(const SemialgebraicDomain& dom,
                                          const TruncatedRegularRep& rep, double hbar) {
    if (hbar <= 0.0) throw ArgumentError("domain_eigenspace: hbar must be positive");
    if (dom.components.empty()) throw ArgumentError("domain_eigenspace: empty domain");
    DomainEigenspace e(rep.two_j_max(), hbar);
    for (int u = 0; u <= rep.two_j_max(); ++u) {
        for (int mi = 0; mi <= u; ++mi) {
            const int two_m = 2 * mi - u;
            bool keep = false;
            for (const auto& comp : dom.components) {
                bool all = true;
                for (const auto& p : comp.polys)
                    if (!p.positive_at(u, two_m, hbar)) {
                        all = false;
                        break;
                    }
                if (all) {
                    keep = true;
                    break;
                }
            }
            e.set(u, two_m, keep);
        }
    }
    return e;
}

/// Mask of the domain shrunk inward by hbar*t: the bulk states of
/// filtration degree t (cap rule R -> R - hbar t, h -> h + hbar t,
/// generalized to an inward shift of each zero set in (sqrt(C), x3)).
inline DomainEigenspace bulk_filtration(const SemialgebraicDomain& dom,
                                        const DomainEigenspace& e, double t) {
    if (t < 0.0) throw ArgumentError("bulk_filtration: t must be nonnegative");
    DomainEigenspace out(e.two_j_max(), e.hbar());
    for (int u = 0; u <= e.two_j_max(); ++u) {
        for (int mi = 0; mi <= u; ++mi) {
            const int two_m = 2 * mi - u;
            if (!e.selected(u, two_m)) continue;
            bool keep = false;
            for (const auto& comp : dom.components) {
                bool all = true;
                for (const auto& p : comp.polys)
                    if (!p.positive_at_shrunk(u, two_m, e.hbar(), t)) {
                        all = false;
                        break;
                    }
                if (all) {
                    keep = true;
                    break;
                }
            }
            out.set(u, two_m, keep);
        }
    }
    return out;
}

// --- Compressed operators -------------------------------------------------

/// Q^D(a) restricted to the selected subspace, stored per spin block over
/// the selected weight indices (column multiplicity 2j+1 is implicit).
struct CompressedOperator {
    std::vector<ComplexMatrix> sub;          // per two_j, selected x selected
    std::vector<std::vector<int>> rows;      // selected weight indices per two_j
    long long dim = 0;                       // with multiplicity

    double norm_normalized() const {
        if (dim == 0) return 0.0;
        double acc = 0.0;
        for (std::size_t u = 0; u < sub.size(); ++u) {
            const double f = sub[u].frobenius();
            acc += double(u + 1) * f * f;
        }
        return std::sqrt(acc / double(dim));
    }
};

inline CompressedOperator compress_blocks(const BlockOperator& op, const DomainEigenspace& e) {
    CompressedOperator c;
    const int umax = std::min(op.two_j_max(), e.two_j_max());
    c.sub.resize(umax + 1);
    c.rows.resize(umax + 1);
    for (int u = 0; u <= umax; ++u) {
        c.rows[u] = e.selected_rows(u);
        const auto& idx = c.rows[u];
        ComplexMatrix m(idx.size(), idx.size());
        for (std::size_t a = 0; a < idx.size(); ++a)
            for (std::size_t b = 0; b < idx.size(); ++b)
                m(a, b) = op.blocks[u](idx[a], idx[b]);
        c.sub[u] = std::move(m);
        c.dim += static_cast<long long>(u + 1) * idx.size();
    }
    return c;
}

inline CompressedOperator quantize_compressed(const DomainPolynomial& a,
                                              const DomainEigenspace& e, double hbar) {
    CompressedOperator c;
    c.sub.resize(e.two_j_max() + 1);
    c.rows.resize(e.two_j_max() + 1);
    for (int u = 0; u <= e.two_j_max(); ++u) {
        c.rows[u] = e.selected_rows(u);
        const auto& idx = c.rows[u];
        if (a.kind == DomainPolynomial::Kind::diagonal) {
            ComplexMatrix m(idx.size(), idx.size());
            for (std::size_t k = 0; k < idx.size(); ++k) {
                const int two_m = 2 * idx[k] - u;
                m(k, k) = a.diag.value_at(u, two_m, hbar);
            }
            c.sub[u] = std::move(m);
        } else {
            const ComplexMatrix full = quantize_tripoly_block(a.gen, u, hbar);
            ComplexMatrix m(idx.size(), idx.size());
            for (std::size_t x = 0; x < idx.size(); ++x)
                for (std::size_t y = 0; y < idx.size(); ++y) m(x, y) = full(idx[x], idx[y]);
            c.sub[u] = std::move(m);
        }
        c.dim += static_cast<long long>(u + 1) * idx.size();
    }
    return c;
}

/// Q^D(a) as a dense matrix on the selected basis (ascending 2j, then
/// column index, then selected weights). Diagonal-kind observables evaluate
/// exactly; general-kind ones require the truncation safety margin
/// two_j_max >= two_j_work + 2 deg(a).
inline ComplexMatrix quantize_observable(const DomainEigenspace& e,
                                         const TruncatedRegularRep& rep,
                                         const DomainPolynomial& a) {
    if (rep.two_j_max() != e.two_j_max())
        throw DimensionError("quantize_observable: eigenspace/representation mismatch");
    const double hbar = e.hbar();
    if (a.kind == DomainPolynomial::Kind::general) {
        const int work = e.max_selected_two_j();
        if (work >= 0 && rep.two_j_max() < work + 2 * a.degree(hbar))
            throw TruncationLeakageError(
                "quantize_observable: truncation margin below two_j_work + 2k");
    }
    const CompressedOperator c = quantize_compressed(a, e, hbar);
    ComplexMatrix out(static_cast<std::size_t>(c.dim), static_cast<std::size_t>(c.dim));
    std::size_t off = 0;
    for (int u = 0; u <= e.two_j_max(); ++u) {
        const std::size_t nsel = c.rows[u].size();
        if (nsel == 0) continue;
        for (int ni = 0; ni <= u; ++ni) {
            for (std::size_t x = 0; x < nsel; ++x)
                for (std::size_t y = 0; y < nsel; ++y)
                    out(off + ni * nsel + x, off + ni * nsel + y) = c.sub[u](x, y);
        }
        off += nsel * static_cast<std::size_t>(u + 1);
    }
    return out;
}

}  // namespace cmq
