#pragma once

#include <array>
#include <cmath>
#include <cstdlib>
#include <map>
#include <vector>

#include "cmq/errors.hpp"

namespace cmq {

/// Real polynomial in the position coordinates (x1, x2, x3) on su(2)^*.
/// Sparse multi-degree representation; supports the symbolic Poisson
/// calculus generated by {x_a, x_b} = -eps_abc x_c.
class TriPoly {
public:
    using Key = std::array<int, 3>;

    TriPoly() = default;

    static TriPoly constant(double c) {
        TriPoly p;
        p.add_term({0, 0, 0}, c);
        return p;
    }

    static TriPoly coordinate(int axis) {
        if (axis < 1 || axis > 3) throw ArgumentError("TriPoly: axis must be 1..3");
        TriPoly p;
        Key k{0, 0, 0};
        k[axis - 1] = 1;
        p.add_term(k, 1.0);
        return p;
    }

    static TriPoly casimir() {
        TriPoly p;
        p.add_term({2, 0, 0}, 1.0);
        p.add_term({0, 2, 0}, 1.0);
        p.add_term({0, 0, 2}, 1.0);
        return p;
    }

    void add_term(const Key& k, double c) {
        if (c == 0.0) return;
        auto [it, inserted] = terms_.try_emplace(k, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0.0) terms_.erase(it);
        }
    }

    const std::map<Key, double>& terms() const { return terms_; }
    bool zero() const { return terms_.empty(); }

    int degree() const {
        int d = 0;
        for (const auto& [k, c] : terms_) d = std::max(d, k[0] + k[1] + k[2]);
        return d;
    }

    double eval(double x1, double x2, double x3) const {
        double acc = 0.0;
        for (const auto& [k, c] : terms_)
            acc += c * std::pow(x1, k[0]) * std::pow(x2, k[1]) * std::pow(x3, k[2]);
        return acc;
    }

    /// R-norm: sum over monomials of |coefficient| R^degree.
    double r_norm(double radius) const {
        double acc = 0.0;
        for (const auto& [k, c] : terms_)
            acc += std::abs(c) * std::pow(radius, double(k[0] + k[1] + k[2]));
        return acc;
    }

    TriPoly derivative(int axis) const {
        TriPoly out;
        for (const auto& [k, c] : terms_) {
            const int d = k[axis - 1];
            if (d == 0) continue;
            Key nk = k;
            nk[axis - 1] = d - 1;
            out.add_term(nk, c * double(d));
        }
        return out;
    }

    TriPoly& operator+=(const TriPoly& o) {
        for (const auto& [k, c] : o.terms_) add_term(k, c);
        return *this;
    }

    TriPoly& operator-=(const TriPoly& o) {
        for (const auto& [k, c] : o.terms_) add_term(k, -c);
        return *this;
    }

    TriPoly& operator*=(double s) {
        if (s == 0.0) {
            terms_.clear();
            return *this;
        }
        for (auto& [k, c] : terms_) c *= s;
        return *this;
    }

    friend TriPoly operator+(TriPoly a, const TriPoly& b) { return a += b; }
    friend TriPoly operator-(TriPoly a, const TriPoly& b) { return a -= b; }
    friend TriPoly operator*(double s, TriPoly p) { return p *= s; }

    friend TriPoly operator*(const TriPoly& a, const TriPoly& b) {
        TriPoly out;
        for (const auto& [ka, ca] : a.terms_)
            for (const auto& [kb, cb] : b.terms_)
                out.add_term({ka[0] + kb[0], ka[1] + kb[1], ka[2] + kb[2]}, ca * cb);
        return out;
    }

private:
    std::map<Key, double> terms_;
};

/// {f, g} generated by {x_a, x_b} = -eps_abc x_c via Leibniz.
inline TriPoly poisson_bracket_su2(const TriPoly& f, const TriPoly& g) {
    static constexpr int eps[3][3][3] = {
        {{0, 0, 0}, {0, 0, 1}, {0, -1, 0}},
        {{0, 0, -1}, {0, 0, 0}, {1, 0, 0}},
        {{0, 1, 0}, {-1, 0, 0}, {0, 0, 0}},
    };
    TriPoly out;
    for (int a = 1; a <= 3; ++a) {
        const TriPoly fa = f.derivative(a);
        if (fa.zero()) continue;
        for (int b = 1; b <= 3; ++b) {
            if (a == b) continue;
            const TriPoly gb = g.derivative(b);
            if (gb.zero()) continue;
            for (int c = 1; c <= 3; ++c) {
                const int e = eps[a - 1][b - 1][c - 1];
                if (e == 0) continue;
                TriPoly term = fa * gb * TriPoly::coordinate(c);
                term *= -double(e);
                out += term;
            }
        }
    }
    return out;
}

}  // namespace cmq
