#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <map>
#include <vector>

#include "cmq/complex_matrix.hpp"
#include "cmq/cylinder.hpp"
#include "cmq/errors.hpp"
#include "cmq/linalg.hpp"
#include "cmq/report.hpp"

namespace cmq {

/// Kinetic-energy Fourier data H(p) = sum_k H_k z^k on a momentum circle of
/// circumference M; Hermiticity requires H_{-k} = conj(H_k).
struct ChainHamiltonianSpec {
    double energy_scale;              // E
    std::map<int, cxd> coefficients;  // k -> H_k
    double momentum;                  // M

    static ChainHamiltonianSpec cosine(double energy_scale, double momentum) {
        ChainHamiltonianSpec s{energy_scale, {}, momentum};
        s.coefficients[0] = cxd(energy_scale, 0.0);
        s.coefficients[1] = cxd(-0.5 * energy_scale, 0.0);
        s.coefficients[-1] = cxd(-0.5 * energy_scale, 0.0);
        return s;
    }

    cxd coefficient(int k) const {
        auto it = coefficients.find(k);
        return it == coefficients.end() ? cxd(0.0) : it->second;
    }

    void validate() const {
        for (const auto& [k, hk] : coefficients) {
            const cxd mirror = coefficient(-k);
            if (std::abs(mirror - std::conj(hk)) > 1e-12 * (1.0 + std::abs(hk)))
                throw SymmetryError("ChainHamiltonianSpec: H_{-k} != conj(H_k)");
        }
    }
};

/// Two-state gap-jumping model: H = H0 + H_n z^n + conj(H_n) z^-n restricted
/// to the span of the two admissible states.
struct TwoStateModel {
    double h0;
    cxd hn;
    double hbar;
    int n;

    double omega() const { return std::abs(hn) / hbar; }

    ComplexMatrix hamiltonian() const {
        ComplexMatrix h(2, 2);
        h(0, 0) = h0;
        h(1, 1) = h0;
        h(1, 0) = hn;              // z^n sends the lower state up
        h(0, 1) = std::conj(hn);   // z^-n sends it back
        return h;
    }

    /// Closed-form evolution operator
    /// e^{-i t H0/hbar} (cos(w t) 1 - i sin(w t)(H - H0)/|H_n|).
    ComplexMatrix evolution(double t) const {
        const double w = omega();
        const cxd phase = std::exp(cxd(0.0, -t * h0 / hbar));
        ComplexMatrix u = ComplexMatrix::identity(2);
        u *= cxd(std::cos(w * t), 0.0);
        if (std::abs(hn) > 0.0) {
            ComplexMatrix off = hamiltonian();
            off(0, 0) = 0.0;
            off(1, 1) = 0.0;
            off *= cxd(0.0, -std::sin(w * t) / std::abs(hn));
            u += off;
        }
        u *= phase;
        return u;
    }
};

/// P_{0->n}(t) = sin^2(omega_n t).
inline double two_state_probability(const TwoStateModel& m, double t) {
    const double s = std::sin(m.omega() * t);
    return s * s;
}

/// Open-boundary chain Hamiltonian sum_k H_k (shift by k); the cosine
/// spec yields E (1 - T/2) with T the nearest-neighbor hopping matrix.
inline ComplexMatrix build_chain_hamiltonian(const ChainHamiltonianSpec& spec,
                                             std::size_t sites) {
    if (sites < 3) throw ArgumentError("build_chain_hamiltonian: need at least 3 sites");
    spec.validate();
    ComplexMatrix h(sites, sites);
    for (const auto& [k, hk] : spec.coefficients) {
        if (hk == cxd(0.0)) continue;
        for (long long s = 0; s < static_cast<long long>(sites); ++s) {
            const long long target = s + k;
            if (target >= 0 && target < static_cast<long long>(sites))
                h(static_cast<std::size_t>(target), static_cast<std::size_t>(s)) += hk;
        }
    }
    return h;
}

/// P_{0->n}(t) = J_n(t omega)^2 on the full line.
inline double line_transition_probability(int n, double t, double omega) {
    if (n < 0) throw RangeError("line_transition_probability: n must be nonnegative");
    const double j = bessel_j(n, t * omega);
    return j * j;
}

namespace detail {

struct Band {
    long long lower = 0;  // max i - j over nonzero entries
    long long upper = 0;  // max j - i
};

inline Band bandwidth_of(const ComplexMatrix& h) {
    Band b;
    for (std::size_t i = 0; i < h.rows(); ++i)
        for (std::size_t j = 0; j < h.cols(); ++j)
            if (h(i, j) != cxd(0.0)) {
                b.lower = std::max(b.lower, static_cast<long long>(i) - static_cast<long long>(j));
                b.upper = std::max(b.upper, static_cast<long long>(j) - static_cast<long long>(i));
            }
    return b;
}

inline std::vector<cxd> banded_apply(const ComplexMatrix& h, const Band& b,
                                     const std::vector<cxd>& v) {
    const long long n = static_cast<long long>(h.rows());
    std::vector<cxd> w(n, cxd(0.0));
    for (long long i = 0; i < n; ++i) {
        const long long j0 = std::max<long long>(0, i - b.lower);
        const long long j1 = std::min<long long>(n - 1, i + b.upper);
        cxd s(0.0);
        for (long long j = j0; j <= j1; ++j)
            s += h(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) * v[j];
        w[i] = s;
    }
    return w;
}

}  // namespace detail

/// exp(-i t H / hbar) psi0 for Hermitian H, by step-scaled Taylor applied to
/// the vector; band structure of H is exploited so long chains stay cheap.
/// Norm is preserved to 1e-10.
inline std::vector<cxd> propagate(const ComplexMatrix& h, const std::vector<cxd>& psi0,
                                  double t, double hbar) {
    if (!h.square() || h.rows() != psi0.size())
        throw DimensionError("propagate: Hamiltonian/state dimensions disagree");
    const double tau_total = t / hbar;
    // max-row-sum norm bounds the spectral radius without the sqrt(N)
    // pessimism of the Frobenius norm on long chains
    double hnorm = 0.0;
    for (std::size_t i = 0; i < h.rows(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < h.cols(); ++j) row += std::abs(h(i, j));
        hnorm = std::max(hnorm, row);
    }
    const double theta = std::abs(tau_total) * hnorm;
    const auto steps = static_cast<std::size_t>(std::ceil(theta / 0.5)) + 1;
    const cxd step_factor = cxd(0.0, -tau_total / static_cast<double>(steps));

    const detail::Band band = detail::bandwidth_of(h);
    std::vector<cxd> psi = psi0;
    for (std::size_t s = 0; s < steps; ++s) {
        std::vector<cxd> acc = psi;
        std::vector<cxd> term = psi;
        for (int k = 1; k <= 18; ++k) {
            term = detail::banded_apply(h, band, term);
            const cxd c = step_factor / static_cast<double>(k);
            for (auto& v : term) v *= c;
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += term[i];
        }
        psi = std::move(acc);
    }
    return psi;
}

/// Amplitudes on the open cosine chain via the exact sine-basis spectral
/// decomposition; an independent oracle for the Bessel line formula.
/// Returns <site|psi(t)> for a walker started at `start`.
inline std::vector<cxd> cosine_chain_amplitudes(std::size_t sites, std::size_t start,
                                                double t, double omega) {
    if (start >= sites) throw ArgumentError("cosine_chain_amplitudes: start out of range");
    const double theta = std::numbers::pi / static_cast<double>(sites + 1);
    std::vector<cxd> out(sites, cxd(0.0));
    // E_k/hbar = omega (1 - cos k theta); eigenvector components sin(k s theta).
    for (std::size_t k = 1; k <= sites; ++k) {
        const double ek = omega * (1.0 - std::cos(static_cast<double>(k) * theta));
        const cxd phase = std::exp(cxd(0.0, -t * ek));
        const double vs = std::sin(static_cast<double>(k) * static_cast<double>(start + 1) * theta);
        for (std::size_t s = 0; s < sites; ++s) {
            out[s] += phase * (2.0 / static_cast<double>(sites + 1)) * vs *
                      std::sin(static_cast<double>(k) * static_cast<double>(s + 1) * theta);
        }
    }
    return out;
}

/// Decompactification study: the gap supports the harmonic n = ceil(|I| M /
/// (2 pi hbar)); the report records the peak two-state transition
/// probability over the time grid for each M.
inline ConvergenceReport decompactification_study(double distance_gap,
                                                  const ChainHamiltonianSpec& base_spec,
                                                  double hbar,
                                                  const std::vector<double>& m_list,
                                                  const std::vector<double>& t_grid) {
    if (m_list.empty() || t_grid.empty())
        throw ArgumentError("decompactification_study: empty grid");
    if (distance_gap <= 0.0) throw ArgumentError("decompactification_study: gap must be positive");

    ConvergenceReport rep;
    rep.metadata["study"] = "supertunnel-decompactify";
    for (double m : m_list) {
        const int n = static_cast<int>(std::ceil(distance_gap * m / (kTwoPi * hbar)));
        const cxd hn = base_spec.coefficient(n);
        const double omega_n = std::abs(hn) / hbar;
        double peak = 0.0;
        for (double t : t_grid) {
            const double s = std::sin(omega_n * t);
            peak = std::max(peak, s * s);
        }
        rep.add(m, peak, 0.0);
    }
    return rep;
}

/// Default time grid: 256 uniform points on [0, 4 pi / omega1].
inline std::vector<double> default_time_grid(double omega1, std::size_t points = 256) {
    if (omega1 <= 0.0) throw ArgumentError("default_time_grid: omega must be positive");
    std::vector<double> grid(points);
    const double tmax = 4.0 * std::numbers::pi / omega1;
    for (std::size_t i = 0; i < points; ++i)
        grid[i] = tmax * static_cast<double>(i) / static_cast<double>(points - 1);
    return grid;
}

}  // namespace cmq
