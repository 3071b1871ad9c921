#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "cmq/complex_matrix.hpp"

namespace cmq {

/// Polynomial in one variable, coefficients stored by ascending degree.
/// Coefficients are complex; domain-defining and position polynomials in
/// practice carry real values. Trailing zeros are trimmed on construction.
class Polynomial {
public:
    Polynomial() = default;

    explicit Polynomial(std::vector<cxd> coeffs) : c_(std::move(coeffs)) { trim(); }

    Polynomial(std::initializer_list<double> coeffs) {
        for (double v : coeffs) c_.emplace_back(v, 0.0);
        trim();
    }

    static Polynomial constant(cxd v) { return Polynomial(std::vector<cxd>{v}); }
    static Polynomial x() { return Polynomial(std::vector<cxd>{cxd(0.0), cxd(1.0)}); }

    bool zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for the zero polynomial
    const std::vector<cxd>& coeffs() const { return c_; }

    cxd coeff(std::size_t k) const { return k < c_.size() ? c_[k] : cxd(0.0); }

    cxd eval(cxd x) const {
        cxd acc(0.0);
        for (std::size_t k = c_.size(); k-- > 0;) acc = acc * x + c_[k];
        return acc;
    }

    double eval_real(double x) const { return eval(cxd(x, 0.0)).real(); }

    Polynomial conj() const {
        std::vector<cxd> out(c_.size());
        for (std::size_t k = 0; k < c_.size(); ++k) out[k] = std::conj(c_[k]);
        return Polynomial(std::move(out));
    }

    Polynomial derivative() const {
        if (c_.size() <= 1) return Polynomial();
        std::vector<cxd> out(c_.size() - 1);
        for (std::size_t k = 1; k < c_.size(); ++k) out[k - 1] = c_[k] * cxd(double(k), 0.0);
        return Polynomial(std::move(out));
    }

    /// p(x + shift) by exact binomial expansion.
    Polynomial shifted(double shift) const {
        if (shift == 0.0 || c_.empty()) return *this;
        std::vector<cxd> out(c_.size(), cxd(0.0));
        for (std::size_t k = 0; k < c_.size(); ++k) {
            // c_k (x + s)^k = c_k sum_i C(k,i) s^{k-i} x^i
            double binom = 1.0;
            std::vector<double> spows(k + 1);
            spows[0] = 1.0;
            for (std::size_t t = 1; t <= k; ++t) spows[t] = spows[t - 1] * shift;
            for (std::size_t i = 0; i <= k; ++i) {
                out[i] += c_[k] * cxd(binom * spows[k - i], 0.0);
                binom = binom * double(k - i) / double(i + 1);
            }
        }
        return Polynomial(std::move(out));
    }

    Polynomial& operator+=(const Polynomial& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), cxd(0.0));
        for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
        trim();
        return *this;
    }

    Polynomial& operator-=(const Polynomial& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), cxd(0.0));
        for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
        trim();
        return *this;
    }

    Polynomial& operator*=(cxd s) {
        for (auto& v : c_) v *= s;
        trim();
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(cxd s, Polynomial p) { return p *= s; }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.c_.empty() || b.c_.empty()) return Polynomial();
        std::vector<cxd> out(a.c_.size() + b.c_.size() - 1, cxd(0.0));
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
        return Polynomial(std::move(out));
    }

    /// Exact integral of |p(x)|^2 over [0, L] via antiderivatives.
    double integral_abs2(double upper) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < c_.size(); ++i) {
            for (std::size_t j = 0; j < c_.size(); ++j) {
                const cxd prod = std::conj(c_[i]) * c_[j];
                acc += prod.real() * std::pow(upper, double(i + j + 1)) / double(i + j + 1);
            }
        }
        return acc;
    }

    /// Sum of coefficient magnitudes weighted by R^degree.
    double coeff_bound(double r) const {
        double acc = 0.0;
        double rp = 1.0;
        for (std::size_t k = 0; k < c_.size(); ++k) {
            acc += std::abs(c_[k]) * rp;
            rp *= r;
        }
        return acc;
    }

private:
    void trim() {
        while (!c_.empty() && c_.back() == cxd(0.0)) c_.pop_back();
    }

    std::vector<cxd> c_;
};

/// Real-coefficient polynomial in one position variable; thin wrapper used
/// where the coefficients are real by construction.
using RealPolynomial = Polynomial;

}  // namespace cmq
