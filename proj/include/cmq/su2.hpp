#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "cmq/complex_matrix.hpp"
#include "cmq/errors.hpp"
#include "cmq/linalg.hpp"
#include "cmq/trivariate.hpp"

namespace cmq {

/// Basis label of the truncated regular representation: spin 2j, weight 2m
/// (the eigenvalue of X3/hbar) and column/multiplicity index 2n, all stored
/// doubled so half-integers stay exact.
struct WeightState {
    int two_j;
    int two_m;
    int two_n;

    bool valid() const {
        return two_j >= 0 && std::abs(two_m) <= two_j && std::abs(two_n) <= two_j &&
               (two_m & 1) == (two_j & 1) && (two_n & 1) == (two_j & 1);
    }

    friend bool operator==(const WeightState& a, const WeightState& b) {
        return a.two_j == b.two_j && a.two_m == b.two_m && a.two_n == b.two_n;
    }
};

/// The SU(2) regular representation truncated at Casimir length
/// j(j+1) <= jmax(jmax+1): each spin-j block enters with multiplicity 2j+1,
/// so the total dimension is sum (2j+1)^2.
class TruncatedRegularRep {
public:
    explicit TruncatedRegularRep(int two_j_max) : two_j_max_(two_j_max) {
        if (two_j_max < 0) throw ArgumentError("TruncatedRegularRep: two_j_max must be >= 0");
        offsets_.resize(two_j_max_ + 2, 0);
        for (int u = 0; u <= two_j_max_; ++u)
            offsets_[u + 1] = offsets_[u] + static_cast<std::size_t>(u + 1) * (u + 1);
    }

    int two_j_max() const { return two_j_max_; }
    std::size_t dim() const { return offsets_.back(); }
    std::size_t block_offset(int two_j) const { return offsets_[two_j]; }
    static std::size_t block_rows(int two_j) { return static_cast<std::size_t>(two_j) + 1; }

    /// Ordering: ascending two_j, then column index n, then weight m.
    std::size_t index_of(const WeightState& s) const {
        if (!s.valid() || s.two_j > two_j_max_)
            throw ArgumentError("TruncatedRegularRep: state outside representation");
        const std::size_t rows = block_rows(s.two_j);
        const std::size_t mi = static_cast<std::size_t>((s.two_m + s.two_j) / 2);
        const std::size_t ni = static_cast<std::size_t>((s.two_n + s.two_j) / 2);
        return offsets_[s.two_j] + ni * rows + mi;
    }

    WeightState state_at(std::size_t pos) const {
        int u = 0;
        while (u + 1 <= two_j_max_ && offsets_[u + 1] <= pos) ++u;
        const std::size_t local = pos - offsets_[u];
        const std::size_t rows = block_rows(u);
        const int mi = static_cast<int>(local % rows);
        const int ni = static_cast<int>(local / rows);
        return {u, 2 * mi - u, 2 * ni - u};
    }

private:
    int two_j_max_;
    std::vector<std::size_t> offsets_;
};

// --- Per-block position operators ---------------------------------------

namespace su2_detail {

inline double ladder_coeff(int u, int two_m, int dir) {
    // sqrt(j(j+1) - m(m +- 1)) in doubled units.
    const double num = double(u) * (u + 2) - double(two_m) * (two_m + 2 * dir);
    return 0.5 * std::sqrt(std::max(0.0, num));
}

}  // namespace su2_detail

/// X3 on the spin-j block: diagonal hbar*m over the weight index.
inline ComplexMatrix x3_block(int two_j, double hbar) {
    const std::size_t n = TruncatedRegularRep::block_rows(two_j);
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) = hbar * 0.5 * (2.0 * static_cast<double>(i) - two_j);
    return m;
}

/// X1 = -hbar J1 expressed in the weight basis labeled by the X3 eigenvalue.
inline ComplexMatrix x1_block(int two_j, double hbar) {
    const std::size_t n = TruncatedRegularRep::block_rows(two_j);
    ComplexMatrix m(n, n);
    for (std::size_t mi = 0; mi < n; ++mi) {
        const int two_m = 2 * static_cast<int>(mi) - two_j;
        if (mi > 0) m(mi - 1, mi) = -0.5 * hbar * su2_detail::ladder_coeff(two_j, two_m, -1);
        if (mi + 1 < n) m(mi + 1, mi) = -0.5 * hbar * su2_detail::ladder_coeff(two_j, two_m, +1);
    }
    return m;
}

inline ComplexMatrix x2_block(int two_j, double hbar) {
    const std::size_t n = TruncatedRegularRep::block_rows(two_j);
    ComplexMatrix m(n, n);
    for (std::size_t mi = 0; mi < n; ++mi) {
        const int two_m = 2 * static_cast<int>(mi) - two_j;
        if (mi > 0) m(mi - 1, mi) = cxd(0.0, 0.5 * hbar) * su2_detail::ladder_coeff(two_j, two_m, -1);
        if (mi + 1 < n)
            m(mi + 1, mi) = cxd(0.0, -0.5 * hbar) * su2_detail::ladder_coeff(two_j, two_m, +1);
    }
    return m;
}

inline ComplexMatrix position_block(int axis, int two_j, double hbar) {
    switch (axis) {
        case 1: return x1_block(two_j, hbar);
        case 2: return x2_block(two_j, hbar);
        case 3: return x3_block(two_j, hbar);
        default: throw ArgumentError("position_block: axis must be 1..3");
    }
}

/// Operator diagonal in the spin label and in the column index; one matrix
/// per block, carrying multiplicity weight 2j+1 in norms and traces.
struct BlockOperator {
    std::vector<ComplexMatrix> blocks;  // indexed by two_j

    int two_j_max() const { return static_cast<int>(blocks.size()) - 1; }

    static BlockOperator zero_like(int two_j_max) {
        BlockOperator op;
        op.blocks.reserve(two_j_max + 1);
        for (int u = 0; u <= two_j_max; ++u) {
            const std::size_t n = TruncatedRegularRep::block_rows(u);
            op.blocks.emplace_back(n, n);
        }
        return op;
    }
};

/// Symmetric-ordered quantization of a polynomial observable on one spin-j
/// block: each monomial is averaged over all distinct factor orderings of
/// X1, X2, X3 per the prequantization rule.
inline ComplexMatrix quantize_tripoly_block(const TriPoly& a, int two_j, double hbar) {
    const std::size_t n = TruncatedRegularRep::block_rows(two_j);
    ComplexMatrix out(n, n);
    const ComplexMatrix x1 = x1_block(two_j, hbar);
    const ComplexMatrix x2 = x2_block(two_j, hbar);
    const ComplexMatrix x3 = x3_block(two_j, hbar);
    for (const auto& [key, coeff] : a.terms()) {
        std::vector<int> factors;
        for (int axis = 0; axis < 3; ++axis)
            for (int k = 0; k < key[axis]; ++k) factors.push_back(axis + 1);
        if (factors.empty()) {
            for (std::size_t i = 0; i < n; ++i) out(i, i) += coeff;
            continue;
        }
        std::sort(factors.begin(), factors.end());
        ComplexMatrix acc(n, n);
        std::size_t orderings = 0;
        do {
            ComplexMatrix prod = (factors[0] == 1 ? x1 : factors[0] == 2 ? x2 : x3);
            for (std::size_t k = 1; k < factors.size(); ++k)
                prod = prod * (factors[k] == 1 ? x1 : factors[k] == 2 ? x2 : x3);
            acc += prod;
            ++orderings;
        } while (std::next_permutation(factors.begin(), factors.end()));
        acc *= cxd(coeff / static_cast<double>(orderings), 0.0);
        out += acc;
    }
    return out;
}

inline BlockOperator quantize_tripoly(const TriPoly& a, int two_j_max, double hbar) {
    BlockOperator op;
    op.blocks.reserve(two_j_max + 1);
    for (int u = 0; u <= two_j_max; ++u) op.blocks.push_back(quantize_tripoly_block(a, u, hbar));
    return op;
}

/// Materializes a block operator as a dense matrix on the full state basis
/// (identity on the column index).
inline ComplexMatrix block_to_dense(const BlockOperator& op, const TruncatedRegularRep& rep) {
    if (op.two_j_max() != rep.two_j_max())
        throw DimensionError("block_to_dense: truncation mismatch");
    ComplexMatrix out(rep.dim(), rep.dim());
    for (int u = 0; u <= rep.two_j_max(); ++u) {
        const std::size_t rows = TruncatedRegularRep::block_rows(u);
        const std::size_t off = rep.block_offset(u);
        for (std::size_t ni = 0; ni < rows; ++ni)
            for (std::size_t a = 0; a < rows; ++a)
                for (std::size_t b = 0; b < rows; ++b)
                    out(off + ni * rows + a, off + ni * rows + b) = op.blocks[u](a, b);
    }
    return out;
}

/// The three prequantized position operators on the truncated regular
/// representation, as dense matrices; [X_a, X_b] = -i hbar eps_abc X_c
/// holds exactly on every block.
struct PositionOperators {
    ComplexMatrix x1, x2, x3;
};

inline PositionOperators position_operators(const TruncatedRegularRep& rep, double hbar) {
    if (hbar <= 0.0) throw ArgumentError("position_operators: hbar must be positive");
    auto assemble = [&](int axis) {
        BlockOperator op;
        for (int u = 0; u <= rep.two_j_max(); ++u) op.blocks.push_back(position_block(axis, u, hbar));
        return block_to_dense(op, rep);
    };
    return {assemble(1), assemble(2), assemble(3)};
}

/// Diagonal of hbar^2 L: the value hbar^2 j(j+1) for every state.
inline std::vector<double> casimir_spectrum(const TruncatedRegularRep& rep, double hbar) {
    std::vector<double> out(rep.dim());
    for (int u = 0; u <= rep.two_j_max(); ++u) {
        const double val = hbar * hbar * 0.25 * double(u) * (u + 2);
        const std::size_t off = rep.block_offset(u);
        const std::size_t count = TruncatedRegularRep::block_rows(u) *
                                  TruncatedRegularRep::block_rows(u);
        for (std::size_t k = 0; k < count; ++k) out[off + k] = val;
    }
    return out;
}

// --- Filtration dimensions and cap counts --------------------------------

/// dim F_l(SU(2)) = sum over 2j with j(j+1) <= l^2 of (2j+1)^2.
inline long long weyl_dimension(double l) {
    if (l < 0.0) throw ArgumentError("weyl_dimension: l must be nonnegative");
    long long dim = 0;
    for (long long u = 0;; ++u) {
        if (double(u) * double(u + 2) > 4.0 * l * l) break;
        dim += (u + 1) * (u + 1);
    }
    return dim;
}

/// Row-by-row enumeration behind the closed-form cap count: row 2j keeps
/// min(2j - 2m, 2j + 1) weights (clamped at a full row), each with
/// multiplicity 2j + 1. Doubled-integer arithmetic throughout.
inline long long cap_weight_enumeration(long long s2, long long m2) {
    if (s2 < 0 || s2 < m2) throw ArgumentError("cap_weight_enumeration: require s2 >= max(m2, 0)");
    long long total = 0;
    for (long long u = 0; u <= s2; ++u) {
        const long long kept = std::clamp(u - m2, 0LL, u + 1);
        total += (u + 1) * kept;
    }
    return total;
}

/// Closed-form cap count (2/3)(s-m)(2s-2m+1)(2s+m+2) in doubled-integer
/// arithmetic; below m = -1/2 the cut lies under every weight row and the
/// count saturates at the full filtration dimension.
inline long long cap_state_count(long long s2, long long m2) {
    if (s2 < 0 || s2 < m2) throw ArgumentError("cap_state_count: require s2 >= max(m2, 0)");
    if (m2 <= -1) {
        long long dim = 0;
        for (long long u = 0; u <= s2; ++u) dim += (u + 1) * (u + 1);
        return dim;
    }
    // (s2-m2)(s2-m2+1)(2 s2+m2+4)/6 is always integral.
    const long long a = s2 - m2;
    return a * (a + 1) * (2 * s2 + m2 + 4) / 6;
}

// --- Multiplication by the fundamental matrix element --------------------

/// Closed-form spin-1/2 Clebsch-Gordan column: coupling (j, m) x (1/2, a/2)
/// to j' = j + up/2, doubled indices throughout.
inline double cg_half(int u, int two_m, int a2, bool up) {
    const double denom = 2.0 * (u + 1);
    if (up) {
        if (a2 > 0) return std::sqrt((u + two_m + 2) / denom);
        return std::sqrt((u - two_m + 2) / denom);
    }
    if (a2 > 0) return -std::sqrt(std::max(0, u - two_m) / denom);
    return std::sqrt(std::max(0, u + two_m) / denom);
}

struct MultiplyFundamentalResult {
    ComplexMatrix matrix;
    bool truncation_leak = false;
};

/// The operator of multiplication by the fundamental representative
/// function pi^{1/2}_{ab} on the truncated regular representation: couples
/// spin 1/2 to both the weight and the column index, with states pushed
/// above the truncation dropped and flagged. In the orthonormal basis
/// sqrt(2j+1) pi^j_{mn} each branch carries the extra weight
/// sqrt((2j+1)/(2j'+1)), which keeps the operator a genuine compression of
/// multiplication by a function of modulus at most 1.
inline MultiplyFundamentalResult multiply_fundamental(const TruncatedRegularRep& rep, int a2,
                                                      int b2) {
    if (std::abs(a2) != 1 || std::abs(b2) != 1)
        throw ArgumentError("multiply_fundamental: indices must be +-1");
    MultiplyFundamentalResult res{ComplexMatrix(rep.dim(), rep.dim()), false};
    for (std::size_t pos = 0; pos < rep.dim(); ++pos) {
        const WeightState s = rep.state_at(pos);
        for (const bool up : {true, false}) {
            const int u_target = s.two_j + (up ? 1 : -1);
            if (u_target < 0) continue;
            if (u_target > rep.two_j_max()) {
                res.truncation_leak = true;
                continue;
            }
            const double cm = cg_half(s.two_j, s.two_m, a2, up);
            const double cn = cg_half(s.two_j, s.two_n, b2, up);
            const double basis = std::sqrt(double(s.two_j + 1) / double(u_target + 1));
            const double coeff = cm * cn * basis;
            if (coeff == 0.0) continue;
            const WeightState target{u_target, s.two_m + a2, s.two_n + b2};
            res.matrix(rep.index_of(target), pos) += coeff;
        }
    }
    return res;
}

}  // namespace cmq
