#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "cmq/cylinder.hpp"
#include "cmq/expr.hpp"

using namespace cmq;

namespace {

CylinderObservable random_observable(std::mt19937_64& rng, int max_index = 3, int max_deg = 3) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::uniform_int_distribution<int> deg(0, max_deg);
    CylinderObservable a;
    for (int n = -max_index; n <= max_index; ++n) {
        std::vector<cxd> c(deg(rng) + 1);
        for (auto& v : c) v = cxd(dist(rng), dist(rng));
        a.set_term(n, Polynomial(std::move(c)));
    }
    return a;
}

}  // namespace

TEST_CASE("phase space construction and the hbar window") {
    const auto ps = CylinderPhaseSpace::from_hbar(1.0, 2.0 * std::numbers::pi, 0.21);
    // N = floor(LM/(2 pi hbar)) = floor(1/0.21) = 4
    CHECK(ps.dim == 4);
    const double lm = ps.length * ps.momentum;
    CHECK(lm / (kTwoPi * (ps.dim + 1)) <= ps.hbar);
    CHECK(ps.hbar <= lm / (kTwoPi * ps.dim));
    CHECK(static_cast<double>(ps.dim) * ps.dx() <= ps.length + 1e-12);

    const auto ps2 = CylinderPhaseSpace::from_dim(1.0, 3.0, 17);
    CHECK(ps2.dim == 17);
    CHECK(ps2.hbar == Catch::Approx(3.0 / (kTwoPi * 17)));
    CHECK_THROWS_AS(CylinderPhaseSpace::from_dim(-1.0, 3.0, 4), ArgumentError);
}

TEST_CASE("position operator eigenvalues") {
    SECTION("two-level example") {
        const auto ps = CylinderPhaseSpace::from_dim(1.0, 5.0, 2);
        const auto x = position_operator(ps);
        const double unit = kTwoPi * ps.hbar / ps.momentum;
        CHECK(x(0, 0) == cxd(unit));
        CHECK(x(1, 1) == cxd(2.0 * unit));
        CHECK(x(0, 1) == cxd(0.0));
    }
    SECTION("single state") {
        const auto ps = CylinderPhaseSpace::from_dim(2.0, 1.0, 1);
        const auto x = position_operator(ps);
        CHECK(x(0, 0) == cxd(ps.dx()));
    }
    SECTION("exact-fit hbar gives x_k = k L / N") {
        const auto ps = CylinderPhaseSpace::from_dim(1.0, 4.0, 4);
        const auto x = position_operator(ps);
        for (int k = 0; k < 4; ++k) CHECK(x(k, k).real() == Catch::Approx(0.25 * (k + 1)));
    }
    SECTION("eigenvalues confined to (0, L]") {
        for (std::size_t n : {1, 3, 17, 64}) {
            const auto ps = CylinderPhaseSpace::from_dim(1.7, 0.9, n);
            const auto x = position_operator(ps);
            for (std::size_t k = 0; k < n; ++k) {
                CHECK(x(k, k).real() > 0.0);
                CHECK(x(k, k).real() <= ps.length + 1e-12);
            }
        }
    }
}

TEST_CASE("shift operator action") {
    const auto ps2 = CylinderPhaseSpace::from_dim(1.0, 1.0, 2);
    SECTION("z sends psi_1 to psi_2 (transpose of the upper-shift display)") {
        const auto z = shift_operator(ps2, 1);
        CHECK(z(1, 0) == cxd(1.0));
        CHECK(z(0, 0) == cxd(0.0));
        CHECK(z(0, 1) == cxd(0.0));
        CHECK(z(1, 1) == cxd(0.0));
    }
    SECTION("m = 0 is the identity") {
        const auto ps = CylinderPhaseSpace::from_dim(1.0, 1.0, 5);
        CHECK((shift_operator(ps, 0) - ComplexMatrix::identity(5)).max_abs() == 0.0);
    }
    SECTION("|m| >= N vanishes") {
        for (int m : {2, -2, 3, 7}) CHECK(shift_operator(ps2, m).max_abs() == 0.0);
    }
    SECTION("commutator [z, zbar] = diag(-1, 1) in the action convention") {
        const auto z = shift_operator(ps2, 1);
        const auto zb = shift_operator(ps2, -1);
        const auto c = commutator(z, zb);
        CHECK(c(0, 0) == cxd(-1.0));
        CHECK(c(1, 1) == cxd(1.0));
        CHECK(std::abs(c(0, 1)) + std::abs(c(1, 0)) == 0.0);
    }
}

TEST_CASE("quantization map on basic observables") {
    const auto ps = CylinderPhaseSpace::from_dim(1.0, 2.0, 2);
    SECTION("constants map to the identity") {
        const auto q = quantize(ps, CylinderObservable::constant(cxd(1.0)));
        CHECK((q - ComplexMatrix::identity(2)).max_abs() == 0.0);
    }
    SECTION("x maps to the position operator") {
        const auto q = quantize(ps, CylinderObservable::position());
        CHECK((q - position_operator(ps)).max_abs() == 0.0);
    }
    SECTION("x z at N=2 has the single entry (3/2) dx") {
        const auto q = quantize(ps, parse_cylinder_observable("x*z"));
        CHECK(q(1, 0) == cxd(1.5 * ps.dx()));
        CHECK(std::abs(q(0, 0)) + std::abs(q(0, 1)) + std::abs(q(1, 1)) == 0.0);
    }
}

TEST_CASE("symmetric and zx-ordered constructions agree") {
    std::mt19937_64 rng(31337);
    for (std::size_t n : {2, 5, 16, 33}) {
        const auto ps = CylinderPhaseSpace::from_dim(1.3, 2.1, n);
        const auto a = random_observable(rng);
        const auto q1 = quantize(ps, a);
        const auto q2 = quantize_zx(ps, a);
        CHECK((q1 - q2).max_abs() < 1e-12);
    }
}

TEST_CASE("reality: quantize(conj a) equals the adjoint") {
    std::mt19937_64 rng(407);
    const auto ps = CylinderPhaseSpace::from_dim(1.0, 1.5, 9);
    for (int trial = 0; trial < 10; ++trial) {
        const auto a = random_observable(rng);
        const auto q = quantize(ps, a);
        const auto qc = quantize(ps, a.conj());
        CHECK((qc - q.adjoint()).max_abs() < 1e-14);
    }
}

TEST_CASE("zx reordering identity f(x) z^n = z^n f(x + n dx)") {
    std::mt19937_64 rng(5501);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (std::size_t n_dim : {4, 17, 64}) {
        const auto ps = CylinderPhaseSpace::from_dim(1.0, 2.0, n_dim);
        for (int n = -8; n <= 8; ++n) {
            std::vector<cxd> c(4);
            for (auto& v : c) v = cxd(dist(rng), 0.0);
            const Polynomial f(std::move(c));
            const auto lhs = position_polynomial_operator(ps, f) * shift_operator(ps, n);
            const auto rhs =
                shift_operator(ps, n) *
                position_polynomial_operator(ps, f.shifted(n * ps.dx()));
            CHECK((lhs - rhs).max_abs() < 1e-12);
        }
    }
}

TEST_CASE("exact shift-product bound and the nm >= 0 equality") {
    // ||z^n z^m - z^{n+m}||_N^2 <= |m|/N, exhaustively for moderate sizes,
    // via the exact integer defect count.
    for (long long n_dim = 1; n_dim <= 64; ++n_dim) {
        for (long long n = -8; n <= 8; ++n) {
            for (long long m = -8; m <= 8; ++m) {
                const long long defect = zz_defect_count(n_dim, n, m);
                CHECK(defect <= std::llabs(m));
                if (n * m >= 0) CHECK(defect == 0);
            }
        }
    }

    // The integer count is the squared normalized norm times N.
    const auto ps = CylinderPhaseSpace::from_dim(1.0, 1.0, 12);
    for (int n = -3; n <= 3; ++n) {
        for (int m = -3; m <= 3; ++m) {
            const auto dev = shift_operator(ps, n) * shift_operator(ps, m) -
                             shift_operator(ps, n + m);
            const double norm2 = std::pow(frob_norm_normalized(dev), 2.0);
            CHECK(norm2 * 12.0 == Catch::Approx(double(zz_defect_count(12, n, m))).margin(1e-12));
        }
    }
}

TEST_CASE("classical L2 norm") {
    const auto ps = CylinderPhaseSpace::from_dim(1.0, 1.0, 4);
    CHECK(classical_l2_norm(ps, CylinderObservable::constant(cxd(1.0))) == Catch::Approx(1.0));
    CHECK(classical_l2_norm(ps, CylinderObservable::position()) ==
          Catch::Approx(1.0 / std::sqrt(3.0)));
    CHECK(classical_l2_norm(ps, CylinderObservable::z_power(1)) == Catch::Approx(1.0));
}

TEST_CASE("R-norm specialization") {
    CHECK(r_norm(CylinderObservable::constant(cxd(1.0)), 5.0) == Catch::Approx(1.0));
    CHECK(r_norm(CylinderObservable::position(), 2.0) == Catch::Approx(2.0));
    CHECK(r_norm(parse_cylinder_observable("x^2 + z*x"), 1.0) == Catch::Approx(2.0));
    CHECK_THROWS_AS(r_norm(CylinderObservable::position(), -1.0), ArgumentError);
}

TEST_CASE("Poisson bracket on the cylinder") {
    const double momentum = 2.7;
    SECTION("x-only observables commute") {
        const auto a = parse_cylinder_observable("x^2 + 3x");
        const auto b = parse_cylinder_observable("x^3");
        CHECK(poisson_bracket(a, b, momentum).terms().empty());
    }
    SECTION("{x, z} = -(2 pi i / M) z") {
        const auto br = poisson_bracket(CylinderObservable::position(),
                                        CylinderObservable::z_power(1), momentum);
        REQUIRE(br.terms().size() == 1);
        const auto& p = br.terms().at(1);
        CHECK(p.degree() == 0);
        CHECK(std::abs(p.coeff(0) - cxd(0.0, -kTwoPi / momentum)) < 1e-15);
    }
    SECTION("{z, zbar} = 0") {
        const auto br = poisson_bracket(CylinderObservable::z_power(1),
                                        CylinderObservable::z_power(-1), momentum);
        CHECK(br.terms().empty());
    }
}

TEST_CASE("Dirac condition holds with the implemented bracket sign") {
    // (i hbar)^{-1} [x, z] must equal Q({x, z}) exactly, on all states.
    const auto ps = CylinderPhaseSpace::from_dim(1.0, 2.0, 8);
    const auto qx = quantize(ps, CylinderObservable::position());
    const auto qz = quantize(ps, CylinderObservable::z_power(1));
    ComplexMatrix lhs = commutator(qx, qz);
    lhs *= cxd(0.0, -1.0 / ps.hbar);
    const auto rhs = quantize(
        ps, poisson_bracket(CylinderObservable::position(), CylinderObservable::z_power(1),
                            ps.momentum));
    CHECK((lhs - rhs).max_abs() < 1e-13);
}

TEST_CASE("separability sweep") {
    SECTION("a = x against the closed-form sum") {
        const auto rep = check_separability(CylinderObservable::position(),
                                            {4, 8, 16, 32, 64, 128}, 1.0, kTwoPi);
        for (const auto& row : rep.rows) {
            const double n = row.parameter;
            const double expect2 = (n + 1.0) * (2.0 * n + 1.0) / (6.0 * n * n);
            CHECK(row.measured * row.measured == Catch::Approx(expect2).epsilon(1e-12));
            CHECK(row.reference == Catch::Approx(1.0 / std::sqrt(3.0)));
            CHECK(row.residual <= 1.6 / n);
        }
        CHECK(residuals_nonincreasing(rep));
    }
    SECTION("a = 1 has zero residual") {
        const auto rep = check_separability(CylinderObservable::constant(cxd(1.0)), {2, 4, 8},
                                            1.0, 1.0);
        for (const auto& row : rep.rows) CHECK(row.residual < 1e-14);
    }
    SECTION("a = z: measured^2 = (N-1)/N") {
        const auto rep = check_separability(CylinderObservable::z_power(1), {2, 4, 8, 16, 64},
                                            1.0, 1.0);
        for (const auto& row : rep.rows) {
            const double n = row.parameter;
            CHECK(row.measured * row.measured == Catch::Approx((n - 1.0) / n).epsilon(1e-12));
            CHECK(row.residual <= 0.6 / n);
        }
    }
    SECTION("empty sweep is rejected") {
        CHECK_THROWS_AS(check_separability(CylinderObservable::position(), {}, 1.0, 1.0),
                        ArgumentError);
    }
}

TEST_CASE("analytic norm sum equals the matrix Frobenius route") {
    std::mt19937_64 rng(60);
    for (std::size_t n : {3, 9, 21}) {
        const auto ps = CylinderPhaseSpace::from_dim(1.1, 1.9, n);
        const auto a = random_observable(rng);
        const double analytic = std::sqrt(quantum_norm_squared(ps, a));
        const double dense = frob_norm_normalized(quantize(ps, a));
        CHECK(analytic == Catch::Approx(dense).epsilon(1e-12));
    }
}

TEST_CASE("von Neumann sweep") {
    SECTION("pure shifts satisfy the exact bound") {
        for (int n : {1, -2}) {
            for (int m : {2, -1, 3}) {
                const auto rep = check_von_neumann(CylinderObservable::z_power(n),
                                                   CylinderObservable::z_power(m),
                                                   {4, 8, 16, 32}, 1.0, 1.0);
                for (const auto& row : rep.rows)
                    CHECK(row.measured * row.measured <=
                          std::abs(double(m)) / row.parameter + 1e-13);
            }
        }
    }
    SECTION("commuting diagonal observables have zero residual") {
        const auto rep = check_von_neumann(CylinderObservable::position(),
                                           CylinderObservable::position(), {3, 9}, 1.0, 1.0);
        for (const auto& row : rep.rows) CHECK(row.measured < 1e-13);
    }
    SECTION("a = xz, b = x decays like C/sqrt(N)") {
        const auto a = parse_cylinder_observable("x*z");
        const auto rep = check_von_neumann(a, CylinderObservable::position(),
                                           {8, 16, 32, 64, 128, 256}, 1.0, kTwoPi);
        const double c_fit = rep.rows[0].measured * std::sqrt(rep.rows[0].parameter);
        for (const auto& row : rep.rows)
            CHECK(row.measured <= 1.25 * c_fit / std::sqrt(row.parameter));
        CHECK(residuals_nonincreasing(rep));
    }
}

TEST_CASE("asymptotic commutativity of quantum observables") {
    const auto a = parse_cylinder_observable("x*z");
    const auto b = parse_cylinder_observable("x^2");
    ConvergenceReport rep;
    for (std::size_t n : {8, 16, 32, 64, 128, 256}) {
        const auto ps = CylinderPhaseSpace::from_dim(1.0, kTwoPi, n);
        const auto qa = quantize(ps, a);
        const auto qb = quantize(ps, b);
        rep.add(double(n), frob_norm_normalized(commutator(qa, qb)), 0.0);
    }
    CHECK(residuals_nonincreasing(rep));
    CHECK(rep.rows.back().measured < rep.rows.front().measured);
}

TEST_CASE("Dirac sweep") {
    SECTION("a = x, b = z is exact on bulk states") {
        const auto rep = check_dirac(CylinderObservable::position(),
                                     CylinderObservable::z_power(1), 1, {8, 16, 32}, 1.0, 2.0);
        for (const auto& row : rep.rows) CHECK(row.measured < 1e-13);
    }
    SECTION("identical observables give zero") {
        const auto a = parse_cylinder_observable("x^2*z");
        const auto rep = check_dirac(a, a, 1, {8, 16}, 1.0, 2.0);
        for (const auto& row : rep.rows) CHECK(row.measured < 1e-12);
    }
    SECTION("a = x^2 z, b = x zbar: defect decays at least linearly in hbar") {
        const auto a = parse_cylinder_observable("x^2*z");
        const auto b = parse_cylinder_observable("x*zbar");
        const auto rep = check_dirac(a, b, 2, {16, 32, 64, 128, 256}, 1.0, kTwoPi);
        for (std::size_t i = 1; i < rep.rows.size(); ++i)
            CHECK(rep.rows[i].measured < 0.75 * rep.rows[i - 1].measured);
        // measured log-log slope is about -2: the half-shifted coefficients
        // make the bulk difference quotients effectively centered
        const double slope = std::log(rep.rows.back().measured / rep.rows.front().measured) /
                             std::log(rep.rows.back().parameter / rep.rows.front().parameter);
        CHECK(slope < -0.8);
        CHECK(slope == Catch::Approx(-2.0).margin(0.3));
    }
    SECTION("margin validation") {
        CHECK_THROWS_AS(check_dirac(CylinderObservable::position(),
                                    CylinderObservable::z_power(1), 1, {2}, 1.0, 1.0),
                        ArgumentError);
        const auto a = parse_cylinder_observable("x*z^3");
        CHECK_THROWS_AS(check_dirac(a, a, 1, {16}, 1.0, 1.0), ArgumentError);
    }
}

TEST_CASE("interval quantization (Prop 2 surfaces)") {
    SECTION("constants give zero defects") {
        const auto one = CylinderObservable::constant(cxd(1.0));
        const auto rep = check_prop2(one, one, {}, 1.0, 2.0, kTwoPi, {8, 16});
        for (const auto& row : rep.rows) CHECK(row.measured < 1e-13);
    }
    SECTION("z, zbar product defect bounded by the edge mass") {
        CoefficientSequence geo{CoefficientSequence::Kind::geometric, 0.5};
        const auto rep = check_prop2(CylinderObservable::z_power(1),
                                     CylinderObservable::z_power(-1), geo, 1.0, 2.0, kTwoPi,
                                     {8, 16, 32});
        for (std::size_t i = 0; i < rep.rows.size(); i += 2) {
            const double n = rep.rows[i].parameter;
            const double hbar = 1.0 / n;  // (v-u) M / (2 pi N) with v-u=1, M=2pi
            const auto n1 = static_cast<long long>(std::floor(1.0 / hbar));
            const auto n2 = static_cast<long long>(std::floor(2.0 / hbar));
            double edge_mass = 0.0;
            for (long long k : {n1, n1 + 1, n2 - 1, n2}) edge_mass += geo.at(k);
            CHECK(rep.rows[i].measured <= 2.0 * edge_mass + 1e-12);
        }
    }
    SECTION("generic pair: product defect decays, Dirac defect cancels") {
        const auto a = parse_cylinder_observable("x*z");
        const auto b = CylinderObservable::position();
        const auto rep = check_prop2(a, b, {}, 1.0, 2.0, kTwoPi, {8, 32, 128, 512});
        const std::size_t rows = rep.rows.size();
        CHECK(rep.rows[rows - 2].measured < 0.2 * rep.rows[0].measured);
        // for z x against x the commutator matches the bracket exactly
        for (std::size_t i = 1; i < rows; i += 2) CHECK(rep.rows[i].measured < 1e-12);
    }
    SECTION("input validation") {
        const auto one = CylinderObservable::constant(cxd(1.0));
        CHECK_THROWS_AS(check_prop2(one, one, {}, 0.0, 1.0, 1.0, {8}), ArgumentError);
        CHECK_THROWS_AS(check_prop2(one, one, {}, 2.0, 1.0, 1.0, {8}), ArgumentError);
    }
}
