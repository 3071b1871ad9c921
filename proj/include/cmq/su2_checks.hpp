#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cmq/errors.hpp"
#include "cmq/linalg.hpp"
#include "cmq/report.hpp"
#include "cmq/su2.hpp"
#include "cmq/su2_domains.hpp"
#include "cmq/trivariate.hpp"

namespace cmq {

namespace su2_detail {

/// Spin cutoff of the Casimir-length-l filtration under the strict ball
/// inequality j(j+1) < l^2.
inline int ball_cutoff_two_j(double l) {
    int u = -1;
    while (double(u + 1) * (u + 3) < 4.0 * l * l) ++u;
    return u;
}

}  // namespace su2_detail

/// Bulk-to-total dimension ratio of a domain under an hbar sweep with the
/// classical domain held fixed; rows (hbar, ratio, 1, residual).
inline ConvergenceReport thickness_ratio(const SemialgebraicDomain& dom, double t,
                                         const std::vector<double>& hbar_list,
                                         double bounding_radius = 0.0) {
    if (hbar_list.empty()) throw ArgumentError("thickness_ratio: empty hbar list");
    if (t < 0.0) throw ArgumentError("thickness_ratio: t must be nonnegative");
    const double radius = bounding_radius > 0.0 ? bounding_radius : dom.bounding_radius();
    ConvergenceReport rep;
    rep.metadata["study"] = "su2-thickness";
    rep.metadata["t"] = detail::format_double(t);
    std::vector<double> hbars = hbar_list;
    std::sort(hbars.begin(), hbars.end(), std::greater<double>());
    for (double hbar : hbars) {
        const int two_j_max = static_cast<int>(std::ceil(2.0 * radius / hbar)) + 2;
        TruncatedRegularRep rep_space(two_j_max);
        const DomainEigenspace e = domain_eigenspace(dom, rep_space, hbar);
        const DomainEigenspace bulk = bulk_filtration(dom, e, t);
        const double total = static_cast<double>(e.dimension());
        if (total == 0.0) throw ArgumentError("thickness_ratio: empty eigenspace at given hbar");
        rep.add(hbar, static_cast<double>(bulk.dimension()) / total, 1.0);
    }
    return rep;
}

/// Von Neumann and Dirac residuals for Q^D on a domain under an hbar sweep.
/// Per hbar two rows are emitted: (hbar, ||Q(a)Q(b)-Q(ab)||_N, 0, .) then
/// (hbar, max bulk-state Dirac defect, 0, .); the bulk space is the
/// eigenspace of the 2t-shrunken domain.
inline ConvergenceReport check_vn_dirac_su2(const DomainPolynomial& a, const DomainPolynomial& b,
                                            const SemialgebraicDomain& dom, double t,
                                            const std::vector<double>& hbar_list) {
    if (hbar_list.empty()) throw ArgumentError("check_vn_dirac_su2: empty hbar list");
    const double radius = dom.bounding_radius();
    ConvergenceReport rep;
    rep.metadata["study"] = "su2-vn-dirac";
    rep.metadata["series"] = "rows alternate: von-neumann, dirac";

    std::vector<double> hbars = hbar_list;
    std::sort(hbars.begin(), hbars.end(), std::greater<double>());
    double smallest_ratio = 1.0;

    const bool both_diagonal = a.kind == DomainPolynomial::Kind::diagonal &&
                               b.kind == DomainPolynomial::Kind::diagonal &&
                               !a.diag.is_exact() && !b.diag.is_exact();

    for (double hbar : hbars) {
        const TriPoly pa = a.as_tripoly(hbar);
        const TriPoly pb = b.as_tripoly(hbar);
        const int deg_margin = 2 * (pa.degree() + pb.degree());

        const int u_domain = static_cast<int>(std::ceil(2.0 * radius / hbar)) + 2;
        TruncatedRegularRep rep_space(u_domain + deg_margin);
        const DomainEigenspace e = domain_eigenspace(dom, rep_space, hbar);
        const DomainEigenspace bulk = bulk_filtration(dom, e, 2.0 * t);
        if (e.dimension() == 0)
            throw ArgumentError("check_vn_dirac_su2: empty eigenspace at given hbar");
        smallest_ratio = static_cast<double>(bulk.dimension()) /
                         static_cast<double>(e.dimension());

        // Diagonal-kind pairs multiply as commuting diagonals and have a
        // vanishing bracket (the Casimir is central); general-kind pairs go
        // through full symmetric ordering.
        DomainPolynomial ab = both_diagonal
                                  ? DomainPolynomial::diagonal(a.diag * b.diag)
                                  : DomainPolynomial::general(pa * pb);
        DomainPolynomial brk = both_diagonal
                                   ? DomainPolynomial::diagonal(DiagonalPoly::zero())
                                   : DomainPolynomial::general(poisson_bracket_su2(pa, pb));

        const CompressedOperator qa = quantize_compressed(a, e, hbar);
        const CompressedOperator qb = quantize_compressed(b, e, hbar);
        const CompressedOperator qab = quantize_compressed(ab, e, hbar);
        const CompressedOperator qbr = quantize_compressed(brk, e, hbar);

        // von Neumann defect, blockwise.
        double vn_acc = 0.0;
        for (int u = 0; u <= e.two_j_max(); ++u) {
            if (qa.rows[u].empty()) continue;
            ComplexMatrix d = qa.sub[u] * qb.sub[u] - qab.sub[u];
            const double f = d.frobenius();
            vn_acc += double(u + 1) * f * f;
        }
        const double vn = std::sqrt(vn_acc / double(e.dimension()));

        // Dirac defect on bulk basis states.
        double dirac = 0.0;
        for (int u = 0; u <= e.two_j_max(); ++u) {
            const auto& idx = qa.rows[u];
            if (idx.empty()) continue;
            ComplexMatrix d = commutator(qa.sub[u], qb.sub[u]);
            d *= cxd(0.0, -1.0 / hbar);
            d -= qbr.sub[u];
            for (std::size_t col = 0; col < idx.size(); ++col) {
                const int two_m = 2 * idx[col] - u;
                if (!bulk.selected(u, two_m)) continue;
                double cn = 0.0;
                for (std::size_t r = 0; r < idx.size(); ++r) cn += std::norm(d(r, col));
                dirac = std::max(dirac, std::sqrt(cn));
            }
        }

        rep.add(hbar, vn, 0.0);
        rep.add(hbar, dirac, 0.0);
    }
    if (smallest_ratio < 0.5) rep.metadata["warning"] = "non-thick configuration";
    return rep;
}

namespace su2_detail {

/// Deterministic Halton sequence point in [0,1).
inline double halton(std::size_t index, int base) {
    double f = 1.0, r = 0.0;
    std::size_t i = index;
    while (i > 0) {
        f /= base;
        r += f * double(i % base);
        i /= base;
    }
    return r;
}

inline double min_eig_power(const ComplexMatrix& block, double shift) {
    // Largest eigenvalue of (shift - A) by power iteration; block Hermitian.
    const std::size_t n = block.rows();
    ComplexMatrix s(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s(i, j) = (i == j ? cxd(shift) : cxd(0.0)) - block(i, j);
    const double top = operator_norm(s, 1e-11);
    return shift - top;
}

}  // namespace su2_detail

/// Spectral positivity study: rows (hbar, min eigenvalue of Q^D(f), 0,
/// max(0, -min eigenvalue)). The precondition f > 0 on the classical
/// closure of the domain is verified by dense deterministic sampling.
inline ConvergenceReport positivity_check(const SemialgebraicDomain& dom,
                                          const DomainPolynomial& f,
                                          const std::vector<double>& hbar_list) {
    if (hbar_list.empty()) throw ArgumentError("positivity_check: empty hbar list");
    if (dom.has_exact_polys() ||
        (f.kind == DomainPolynomial::Kind::diagonal && f.diag.is_exact()))
        throw ArgumentError("positivity_check: needs hbar-independent classical data");
    const double radius = dom.bounding_radius();
    if (radius <= 0.0) throw ArgumentError("positivity_check: empty domain");

    // Closure sampling at 1e4 accepted points (Halton bases 2,3,5).
    const TriPoly ftri = f.as_tripoly(1.0);
    std::size_t accepted = 0;
    for (std::size_t draw = 1; draw < 2000000 && accepted < 10000; ++draw) {
        const double x1 = radius * (2.0 * su2_detail::halton(draw, 2) - 1.0);
        const double x2 = radius * (2.0 * su2_detail::halton(draw, 3) - 1.0);
        const double x3 = radius * (2.0 * su2_detail::halton(draw, 5) - 1.0);
        const double c = x1 * x1 + x2 * x2 + x3 * x3;
        bool in_closure = false;
        for (const auto& comp : dom.components) {
            bool all = true;
            for (const auto& p : comp.polys)
                if (p.eval(c, x3) < -1e-9 * p.abs_scale(c, x3)) {
                    all = false;
                    break;
                }
            if (all) {
                in_closure = true;
                break;
            }
        }
        if (!in_closure) continue;
        ++accepted;
        if (ftri.eval(x1, x2, x3) <= 0.0)
            throw PreconditionError("positivity_check: f is not strictly positive on the closure");
    }

    ConvergenceReport rep;
    rep.metadata["study"] = "su2-positivity";
    std::vector<double> hbars = hbar_list;
    std::sort(hbars.begin(), hbars.end(), std::greater<double>());
    for (double hbar : hbars) {
        const TriPoly ft = f.as_tripoly(hbar);
        const int deg_margin = 2 * ft.degree();
        const int u_domain = static_cast<int>(std::ceil(2.0 * radius / hbar)) + 2;
        TruncatedRegularRep rep_space(u_domain + deg_margin);
        const DomainEigenspace e = domain_eigenspace(dom, rep_space, hbar);
        if (e.dimension() == 0)
            throw ArgumentError("positivity_check: empty eigenspace at given hbar");
        const CompressedOperator q = quantize_compressed(f, e, hbar);

        double sigma = 1.0;
        for (int u = 0; u <= e.two_j_max(); ++u)
            if (q.sub[u].rows() > 0) sigma = std::max(sigma, operator_norm(q.sub[u], 1e-11) + 1.0);
        double min_eig = sigma;
        for (int u = 0; u <= e.two_j_max(); ++u) {
            if (q.sub[u].rows() == 0) continue;
            min_eig = std::min(min_eig, su2_detail::min_eig_power(q.sub[u], sigma));
        }
        rep.add(hbar, min_eig, 0.0);
        rep.rows.back().residual = std::max(0.0, -min_eig);
    }
    return rep;
}

/// Checks ||Q(a) psi|| <= |a|_{hbar l} ||psi|| on every basis state of F_l.
inline bool prequant_bound_check(const DomainPolynomial& a, double l, double hbar) {
    if (l < 0.0 || hbar <= 0.0) throw ArgumentError("prequant_bound_check: bad l or hbar");
    const TriPoly p = a.as_tripoly(hbar);
    const double bound = p.r_norm(hbar * l);
    int u_cut = 0;
    while (double(u_cut + 1) * (u_cut + 3) <= 4.0 * l * l) ++u_cut;
    for (int u = 0; u <= u_cut; ++u) {
        const ComplexMatrix q = quantize_tripoly_block(p, u, hbar);
        for (std::size_t col = 0; col < q.cols(); ++col) {
            double cn = 0.0;
            for (std::size_t r = 0; r < q.rows(); ++r) cn += std::norm(q(r, col));
            if (std::sqrt(cn) > bound * (1.0 + 1e-12) + 1e-300) return false;
        }
    }
    return true;
}

/// Separability on the ball via multiplication by pi^{1/2}_{ab}: rows
/// (l, ||Q^D||_N^2, 1/2, residual), computed from the closed-form
/// Clebsch-Gordan branch weights without materializing matrices.
inline ConvergenceReport check_separability_ball(int a2, int b2,
                                                 const std::vector<double>& l_list,
                                                 double ball_radius = 1.0) {
    if (std::abs(a2) != 1 || std::abs(b2) != 1)
        throw ArgumentError("check_separability_ball: indices must be +-1");
    if (l_list.empty()) throw ArgumentError("check_separability_ball: empty l list");
    ConvergenceReport rep;
    rep.metadata["study"] = "su2-separability-ball";
    rep.metadata["hbar_rule"] = "hbar = R / l";
    rep.metadata["ball_radius"] = detail::format_double(ball_radius);
    rep.metadata["truncation_leak"] = "false";
    for (double l : l_list) {
        const int u_cut = su2_detail::ball_cutoff_two_j(l);
        if (u_cut < 0) throw ArgumentError("check_separability_ball: empty filtration");
        long long dim = 0;
        double acc = 0.0;
        for (int u = 0; u <= u_cut; ++u) {
            dim += static_cast<long long>(u + 1) * (u + 1);
            // Branch weights summed over the (m, n) lattice factorize; with
            // the orthonormal-basis factor (2j+1)/(2j'+1) the block totals
            // are (u+1)(u+2)/4 up and (u+1)u/4 down, so a block with both
            // branches kept contributes exactly (u+1)^2/2.
            if (u + 1 <= u_cut) acc += 0.25 * double(u + 1) * (u + 2);
            acc += 0.25 * double(u + 1) * u;
        }
        const double measured = acc / static_cast<double>(dim);
        rep.add(l, measured, 0.5);
    }
    return rep;
}

}  // namespace cmq
