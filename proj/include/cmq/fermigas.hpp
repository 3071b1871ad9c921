#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "cmq/errors.hpp"
#include "cmq/linalg.hpp"

namespace cmq {

/// Degenerate 1D Fermi gas with compact momentum space: N single-particle
/// states on (0, L], Ncal fermions, cosine dispersion with scale
/// E = M^2 / (4 pi^2 m).
struct FermiGasParams {
    double length;       // L
    double momentum;     // M
    double hbar;
    double mass;
    std::size_t states;  // N
    std::size_t fermions;  // Ncal

    double energy_scale() const {
        return momentum * momentum / (4.0 * std::numbers::pi * std::numbers::pi * mass);
    }

    double theta() const { return std::numbers::pi / static_cast<double>(states + 1); }

    void validate() const {
        if (length <= 0.0 || momentum <= 0.0 || hbar <= 0.0 || mass <= 0.0 || states == 0)
            throw ArgumentError("FermiGasParams: all scales must be positive");
        if (fermions > states)
            throw ExclusionPrincipleError("FermiGasParams: more fermions than available states");
    }
};

/// Chebyshev second-kind recurrence P_{n+1} = lambda P_n - P_{n-1},
/// P_0 = 1, P_1 = lambda.
inline double chebyshev_u(int n, double lam) {
    if (n < 0) throw RangeError("chebyshev_u: order must be nonnegative");
    double pm = 1.0;  // P_0
    if (n == 0) return pm;
    double pc = lam;  // P_1
    for (int k = 1; k < n; ++k) {
        const double pn = lam * pc - pm;
        pm = pc;
        pc = pn;
    }
    return pc;
}

/// Single-particle levels E_k = E (1 - cos k theta_N), ascending.
inline std::vector<double> spectrum_closed_form(const FermiGasParams& p) {
    p.validate();
    const double e = p.energy_scale();
    const double th = p.theta();
    std::vector<double> out(p.states);
    for (std::size_t k = 1; k <= p.states; ++k)
        out[k - 1] = e * (1.0 - std::cos(static_cast<double>(k) * th));
    return out;
}

/// The tridiagonal Toeplitz Hamiltonian E (1 - T/2) in SymTridiag form;
/// its Sturm-bisection spectrum is the independent oracle for the closed form.
inline SymTridiag fermi_tridiagonal(const FermiGasParams& p) {
    p.validate();
    const double e = p.energy_scale();
    SymTridiag t;
    t.diag.assign(p.states, e);
    t.offdiag.assign(p.states > 1 ? p.states - 1 : 0, -0.5 * e);
    return t;
}

namespace detail {

inline double total_energy_closed(double e, double theta, double ncal) {
    // U = E (Ncal + 1/2) - (E/2)(cos Ncal theta + sin Ncal theta cot(theta/2))
    const double phi = ncal * theta;
    return e * (ncal + 0.5) -
           0.5 * e * (std::cos(phi) + std::sin(phi) / std::tan(0.5 * theta));
}

}  // namespace detail

/// Closed-form total energy of the filled Fermi sea (sum of the lowest
/// Ncal levels).
inline double total_energy(const FermiGasParams& p) {
    p.validate();
    return detail::total_energy_closed(p.energy_scale(), p.theta(),
                                       static_cast<double>(p.fermions));
}

/// n_max = N / L = M / (2 pi hbar).
inline double max_density(const FermiGasParams& p) {
    p.validate();
    return static_cast<double>(p.states) / p.length;
}

/// Semiclassical degeneracy pressure, Eq. form
/// P = (M^3 / (8 pi^4 hbar m)) [sin(pi Ncal/N) - (pi Ncal/N) cos(pi Ncal/N)].
inline double pressure_semiclassical(const FermiGasParams& p) {
    p.validate();
    const double pi = std::numbers::pi;
    const double ratio = pi * static_cast<double>(p.fermions) / static_cast<double>(p.states);
    const double pref = std::pow(p.momentum, 3.0) / (8.0 * std::pow(pi, 4.0) * p.hbar * p.mass);
    return pref * (std::sin(ratio) - ratio * std::cos(ratio));
}

/// Exact pressure as a central finite difference of the step-dependent U(L).
struct PressureResult {
    double value;
    std::size_t states_minus;  // N(L - dL)
    std::size_t states_plus;   // N(L + dL)
    bool step_warning;         // N jumped by more than one across the stencil
};

/// -[U(L+dL) - U(L-dL)] / (2 dL) holding Ncal, M, hbar, mass fixed and
/// re-deriving N(L) at each endpoint. U depends on L only through the
/// integer N(L), so the difference quotient is meaningful when the stencil
/// brackets a step; crossing more than one step sets the warning flag.
inline PressureResult pressure_exact(const FermiGasParams& p, double dl) {
    p.validate();
    if (dl <= 0.0 || dl >= p.length) throw ArgumentError("pressure_exact: require 0 < dL << L");

    auto states_at = [&](double length) {
        return static_cast<std::size_t>(
            std::floor(length * p.momentum / (kTwoPi * p.hbar)));
    };
    const std::size_t n_minus = states_at(p.length - dl);
    const std::size_t n_plus = states_at(p.length + dl);
    if (n_minus == 0 || p.fermions > n_minus)
        throw ExclusionPrincipleError("pressure_exact: fermions exceed states at L - dL");

    const double e = p.energy_scale();
    auto energy_with_states = [&](std::size_t n) {
        const double theta = std::numbers::pi / static_cast<double>(n + 1);
        return detail::total_energy_closed(e, theta, static_cast<double>(p.fermions));
    };
    const double u_minus = energy_with_states(n_minus);
    const double u_plus = energy_with_states(n_plus);
    PressureResult res;
    res.value = -(u_plus - u_minus) / (2.0 * dl);
    res.states_minus = n_minus;
    res.states_plus = n_plus;
    res.step_warning = (n_plus > n_minus + 1) || (n_plus + 1 < n_minus);
    return res;
}

}  // namespace cmq
