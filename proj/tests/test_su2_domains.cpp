#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "cmq/su2_checks.hpp"
#include "cmq/su2_domains.hpp"

using namespace cmq;

TEST_CASE("ball eigenspaces select whole spin blocks") {
    const double hbar = 0.25;
    TruncatedRegularRep rep(12);
    SECTION("float ball with an epsilon bump") {
        // R^2 = hbar^2 s(s+1) + eps with s = 2 keeps j <= 2, i.e. u <= 4.
        const double r2 = hbar * hbar * (2.0 * 3.0) + 1e-6;
        const auto dom = SemialgebraicDomain::basic({DiagonalPoly({{r2}, {-1.0}})});
        const auto e = domain_eigenspace(dom, rep, hbar);
        long long expect = 0;
        for (int u = 0; u <= 4; ++u) expect += (u + 1) * (u + 1);
        CHECK(e.dimension() == expect);
        CHECK(e.max_selected_two_j() == 4);
    }
    SECTION("exact-units ball includes the top shell") {
        const auto dom = SemialgebraicDomain::basic({DiagonalPoly::exact_ball(4)});
        const auto e = domain_eigenspace(dom, rep, hbar);
        CHECK(e.dimension() == 1 + 4 + 9 + 16 + 25);
    }
}

TEST_CASE("cap eigenspace counts the strict eigenvalue lattice") {
    // Cap with R^2 = hbar^2 s(s+1)+eps, h = 0 at s = 1: the joint
    // eigenvalue conditions j <= 1 and hbar m > 0 keep the m = 1/2 pair of
    // the spin-1/2 block and the m = 1 triple of the spin-1 block.
    const double hbar = 0.5;
    TruncatedRegularRep rep(6);
    const auto dom = SemialgebraicDomain::cap_exact(2, 0);
    const auto e = domain_eigenspace(dom, rep, hbar);
    CHECK(e.selected(1, 1));
    CHECK(e.selected(2, 2));
    CHECK_FALSE(e.selected(1, -1));
    CHECK_FALSE(e.selected(2, 0));
    CHECK(e.dimension() == 2 + 3);
    // The closed-form cap weight count tallies the
    // unconstrained half-integer lattice instead; both values are pinned here.
    CHECK(cap_state_count(2, 0) == 8);
}

TEST_CASE("union and intersection of eigenspaces") {
    const double hbar = 1.0;
    TruncatedRegularRep rep(8);
    const auto ball_a = SemialgebraicDomain::ball(1.3);
    // small balls centered at x3 = +1 and x3 = -1
    const auto ball_b = SemialgebraicDomain::basic({DiagonalPoly::shifted_ball(0.9, -1.0)});
    const auto ball_c = SemialgebraicDomain::basic({DiagonalPoly::shifted_ball(0.9, +1.0)});

    const auto ea = domain_eigenspace(ball_a, rep, hbar);
    const auto eb = domain_eigenspace(ball_b, rep, hbar);
    const auto ec = domain_eigenspace(ball_c, rep, hbar);

    CHECK(ea.dimension() == 5);  // j <= 1/2
    CHECK(eb.dimension() == 2);  // the (j, m) = (1/2, 1/2) weight pair
    CHECK(eb.selected(1, 1));
    CHECK(ec.dimension() == 2);
    CHECK(ec.selected(1, -1));

    SECTION("intersection as domains equals mask intersection") {
        const auto e_ab = domain_eigenspace(SemialgebraicDomain::intersect(ball_a, ball_b),
                                            rep, hbar);
        CHECK(e_ab.same_mask(ea.intersect(eb)));
        CHECK(e_ab.dimension() == 2);
    }
    SECTION("union of compatible domains sums the masks") {
        const auto e_bc =
            domain_eigenspace(SemialgebraicDomain::unite(ball_b, ball_c), rep, hbar);
        CHECK(e_bc.same_mask(eb.unite(ec)));
        CHECK(e_bc.dimension() == 4);
    }
    SECTION("hbar-disconnected iff masks orthogonal") {
        CHECK(eb.orthogonal_to(ec));
        CHECK(eb.intersect(ec).dimension() == 0);
        CHECK_FALSE(ea.orthogonal_to(eb));
    }
}

TEST_CASE("general-kind defining polynomials are rejected") {
    CHECK_THROWS_AS(SemialgebraicDomain::from_polynomials(
                        {DomainPolynomial::general(TriPoly::coordinate(1))}),
                    QuantizabilityError);
    const auto ok = SemialgebraicDomain::from_polynomials(
        {DomainPolynomial::diagonal(DiagonalPoly::ball(1.0))});
    CHECK(ok.components.size() == 1);
}

TEST_CASE("strictness excludes knife-edge states") {
    // h exactly on a lattice value: the state at hbar m = h is excluded.
    const double hbar = 0.5;
    TruncatedRegularRep rep(4);
    const auto dom = SemialgebraicDomain::cap(10.0, hbar * 1.0);  // h = x3(two_m = 2)
    const auto e = domain_eigenspace(dom, rep, hbar);
    CHECK_FALSE(e.selected(2, 2));  // value 0 is not strictly positive
    CHECK(e.selected(4, 4));
}

TEST_CASE("bulk filtration") {
    const double hbar = 0.05;
    const double radius = 1.0, height = 0.0;
    const auto dom = SemialgebraicDomain::cap(radius, height);
    const int two_j_max = static_cast<int>(std::ceil(2.0 * radius / hbar)) + 2;
    TruncatedRegularRep rep(two_j_max);
    const auto e = domain_eigenspace(dom, rep, hbar);

    SECTION("t = 0 is the identity on masks") {
        CHECK(bulk_filtration(dom, e, 0.0).same_mask(e));
    }
    SECTION("two-path equality with the explicitly shrunken cap") {
        const double t = 2.0;
        const auto bulk = bulk_filtration(dom, e, t);
        const auto shrunk =
            SemialgebraicDomain::cap(radius - hbar * t, height + hbar * t);
        const auto e2 = domain_eigenspace(shrunk, rep, hbar);
        CHECK(bulk.same_mask(e2));
        CHECK(bulk.dimension() > 0);
        CHECK(bulk.dimension() < e.dimension());
    }
    SECTION("masks are nested in t") {
        const auto b1 = bulk_filtration(dom, e, 1.0);
        const auto b3 = bulk_filtration(dom, e, 3.0);
        CHECK(b3.subset_of(b1));
        CHECK(b1.subset_of(e));
    }
    SECTION("negative t rejected") {
        CHECK_THROWS_AS(bulk_filtration(dom, e, -0.5), ArgumentError);
    }
}

TEST_CASE("quantize_observable on eigenspaces") {
    const double hbar = 0.2;
    SECTION("constants give the identity") {
        TruncatedRegularRep rep(6);
        const auto e = domain_eigenspace(SemialgebraicDomain::cap_exact(4, 0), rep, hbar);
        const auto q = quantize_observable(
            e, rep, DomainPolynomial::diagonal(DiagonalPoly::constant(1.0)));
        CHECK(q.rows() == static_cast<std::size_t>(e.dimension()));
        CHECK((q - ComplexMatrix::identity(q.rows())).max_abs() < 1e-15);
    }
    SECTION("x3 on a cap is diagonal with entries hbar m") {
        TruncatedRegularRep rep(6);
        const auto e = domain_eigenspace(SemialgebraicDomain::cap_exact(4, 1), rep, hbar);
        const auto q = quantize_observable(
            e, rep, DomainPolynomial::diagonal(DiagonalPoly({{0.0, 1.0}})));
        // selected weights have 2m > 1; diagonal entries are hbar m > hbar/2
        for (std::size_t k = 0; k < q.rows(); ++k) {
            CHECK(q(k, k).real() > 0.5 * hbar);
            for (std::size_t l = 0; l < q.cols(); ++l)
                if (k != l) CHECK(std::abs(q(k, l)) == 0.0);
        }
    }
    SECTION("x1 on the ball matches the compressed position operator") {
        TruncatedRegularRep rep(4);  // margin 2 above the working ball j <= 1
        const auto e = domain_eigenspace(SemialgebraicDomain::basic({DiagonalPoly::exact_ball(2)}),
                                         rep, hbar);
        const auto q =
            quantize_observable(e, rep, DomainPolynomial::general(TriPoly::coordinate(1)));
        REQUIRE(q.rows() == 14);
        const auto ops = position_operators(rep, hbar);
        // collect selected positions in the same ordering used by the dense map
        std::vector<std::size_t> keep;
        for (int u = 0; u <= 4; ++u)
            for (int ni = 0; ni <= u; ++ni)
                for (int mi = 0; mi <= u; ++mi) {
                    const WeightState s{u, 2 * mi - u, 2 * ni - u};
                    if (e.selected_state(s)) keep.push_back(rep.index_of(s));
                }
        REQUIRE(keep.size() == 14);
        for (std::size_t a = 0; a < keep.size(); ++a)
            for (std::size_t b = 0; b < keep.size(); ++b)
                CHECK(std::abs(q(a, b) - ops.x1(keep[a], keep[b])) < 1e-14);
    }
    SECTION("truncation margin is enforced for general observables") {
        TruncatedRegularRep rep(2);
        const auto e = domain_eigenspace(SemialgebraicDomain::basic({DiagonalPoly::exact_ball(2)}),
                                         rep, hbar);
        CHECK_THROWS_AS(
            quantize_observable(e, rep, DomainPolynomial::general(TriPoly::coordinate(1))),
            TruncationLeakageError);
    }
}

TEST_CASE("compression consistency: Q^D = P Q P with an exact projector") {
    const double hbar = 0.3;
    TruncatedRegularRep rep(6);
    const auto dom = SemialgebraicDomain::cap_exact(2, -1);
    const auto e = domain_eigenspace(dom, rep, hbar);

    const TriPoly obs = TriPoly::coordinate(1) * TriPoly::coordinate(3);
    const auto q_full = block_to_dense(quantize_tripoly(obs, 6, hbar), rep);

    // P as a dense 0/1 diagonal mask
    ComplexMatrix p(rep.dim(), rep.dim());
    for (std::size_t pos = 0; pos < rep.dim(); ++pos)
        if (e.selected_state(rep.state_at(pos))) p(pos, pos) = 1.0;
    CHECK((p * p - p).max_abs() == 0.0);
    CHECK((p - p.adjoint()).max_abs() == 0.0);

    const ComplexMatrix pqp = p * q_full * p;
    const auto q_comp = quantize_observable(e, rep, DomainPolynomial::general(obs));

    // embed the compressed matrix back and compare on selected entries
    std::vector<std::size_t> keep;
    for (int u = 0; u <= 6; ++u)
        for (int ni = 0; ni <= u; ++ni)
            for (int mi = 0; mi <= u; ++mi) {
                const WeightState s{u, 2 * mi - u, 2 * ni - u};
                if (e.selected_state(s)) keep.push_back(rep.index_of(s));
            }
    REQUIRE(keep.size() == static_cast<std::size_t>(e.dimension()));
    for (std::size_t a = 0; a < keep.size(); ++a)
        for (std::size_t b = 0; b < keep.size(); ++b)
            CHECK(std::abs(q_comp(a, b) - pqp(keep[a], keep[b])) < 1e-14);
}

TEST_CASE("thickness ratio sweeps") {
    SECTION("cap approaches ratio 1") {
        const auto dom = SemialgebraicDomain::cap(1.0, 0.0);
        const auto rep = thickness_ratio(dom, 2.0, {0.08, 0.04, 0.02, 0.01}, 1.0);
        REQUIRE(rep.rows.size() == 4);
        for (std::size_t i = 1; i < rep.rows.size(); ++i)
            CHECK(rep.rows[i].measured >= rep.rows[i - 1].measured - 0.02);
        CHECK(rep.rows.back().measured >= 0.90);
        CHECK(rep.rows.back().parameter == 0.01);  // sorted descending in hbar
    }
    SECTION("t = 0 gives ratio exactly 1") {
        const auto dom = SemialgebraicDomain::cap(1.0, 0.0);
        const auto rep = thickness_ratio(dom, 0.0, {0.1, 0.05}, 1.0);
        for (const auto& row : rep.rows) CHECK(row.measured == 1.0);
    }
    SECTION("ball ratio is a pure block-count ratio") {
        const auto dom = SemialgebraicDomain::ball(1.0);
        const double hbar = 0.02;
        const auto rep = thickness_ratio(dom, 1.0, {hbar}, 1.0);
        // shrunken ball keeps u(u+2) < 4 (R - hbar t)^2 / hbar^2
        auto count = [&](double r) {
            long long n = 0;
            for (int u = 0; double(u) * (u + 2) * hbar * hbar < 4.0 * r * r; ++u)
                n += (u + 1) * (u + 1);
            return n;
        };
        CHECK(rep.rows[0].measured ==
              Catch::Approx(double(count(1.0 - hbar)) / double(count(1.0))).margin(1e-12));
    }
}

TEST_CASE("von Neumann / Dirac sweeps over SU(2) domains") {
    SECTION("commuting diagonal pair gives zero residuals") {
        const auto dom = SemialgebraicDomain::cap(1.0, 0.1);
        const auto a = DomainPolynomial::diagonal(DiagonalPoly({{0.0, 1.0}}));  // x3
        const auto b = DomainPolynomial::diagonal(DiagonalPoly({{0.0}, {1.0}}));  // C
        const auto rep = check_vn_dirac_su2(a, b, dom, 1.0, {0.2, 0.1, 0.05});
        for (const auto& row : rep.rows) CHECK(row.measured < 1e-13);
    }
    SECTION("linear pair: Dirac exact on bulk, von Neumann first order-ish") {
        const auto dom = SemialgebraicDomain::cap(1.0, 0.0);
        const auto a = DomainPolynomial::general(TriPoly::coordinate(1));
        const auto b = DomainPolynomial::general(TriPoly::coordinate(2));
        const auto rep = check_vn_dirac_su2(a, b, dom, 1.0, {0.2, 0.1, 0.05, 0.025});
        REQUIRE(rep.rows.size() == 8);
        for (std::size_t i = 0; i < rep.rows.size(); i += 2) {
            const double vn = rep.rows[i].measured;
            const double dirac = rep.rows[i + 1].measured;
            CHECK(vn > 0.0);
            CHECK(dirac <= 1e-12);
        }
        // von Neumann residual decreases with hbar
        CHECK(rep.rows[6].measured < rep.rows[0].measured);
    }
    SECTION("blockwise residual equals the dense-matrix route") {
        const double hbar = 0.25;
        const auto dom = SemialgebraicDomain::cap(1.0, 0.0);
        const int u_domain = static_cast<int>(std::ceil(2.0 / hbar)) + 2;
        TruncatedRegularRep rep(u_domain + 4);
        const auto e = domain_eigenspace(dom, rep, hbar);
        const auto qa =
            quantize_observable(e, rep, DomainPolynomial::general(TriPoly::coordinate(1)));
        const auto qb =
            quantize_observable(e, rep, DomainPolynomial::general(TriPoly::coordinate(2)));
        const auto qab = quantize_observable(
            e, rep,
            DomainPolynomial::general(TriPoly::coordinate(1) * TriPoly::coordinate(2)));
        const double dense = frob_norm_normalized(qa * qb - qab);
        const auto swept = check_vn_dirac_su2(DomainPolynomial::general(TriPoly::coordinate(1)),
                                              DomainPolynomial::general(TriPoly::coordinate(2)),
                                              dom, 1.0, {hbar});
        CHECK(swept.rows[0].measured == Catch::Approx(dense).epsilon(1e-12));
    }
    SECTION("non-thick configurations are flagged") {
        // at hbar = 0.25 a 2t = 6 shrink guts the cap
        const auto dom = SemialgebraicDomain::cap(1.0, 0.0);
        const auto a = DomainPolynomial::general(TriPoly::coordinate(1));
        const auto b = DomainPolynomial::general(TriPoly::coordinate(2));
        const auto rep = check_vn_dirac_su2(a, b, dom, 3.0, {0.25});
        CHECK(rep.metadata.count("warning") == 1);
    }
    SECTION("quadratic-linear pair: von Neumann decays, Dirac cancels") {
        const auto dom = SemialgebraicDomain::cap(1.0, -0.2);
        const auto a =
            DomainPolynomial::general(TriPoly::coordinate(1) * TriPoly::coordinate(3));
        const auto b = DomainPolynomial::general(TriPoly::coordinate(2));
        const auto rep = check_vn_dirac_su2(a, b, dom, 1.0, {0.2, 0.05});
        REQUIRE(rep.rows.size() == 4);
        CHECK(rep.rows[2].measured < rep.rows[0].measured);
        // (i hbar)^{-1}[Q(x1 x3), Q(x2)] = Q(x1^2 - x3^2) exactly
        CHECK(rep.rows[1].measured < 1e-12);
        CHECK(rep.rows[3].measured < 1e-12);
    }
}

TEST_CASE("positivity of quantized positive observables") {
    SECTION("diagonal observables positive on the closure stay positive") {
        const auto dom = SemialgebraicDomain::cap(1.0, 0.2);
        // 1.5 R^2 - C >= 0.5 on the closure
        const auto f = DomainPolynomial::diagonal(DiagonalPoly({{1.5}, {-1.0}}));
        const auto rep = positivity_check(dom, f, {0.2, 0.1, 0.05});
        for (const auto& row : rep.rows) {
            CHECK(row.measured >= 0.0);
            CHECK(row.residual == 0.0);
        }
    }
    SECTION("constants have themselves as the minimum eigenvalue") {
        const auto dom = SemialgebraicDomain::ball(1.0);
        const auto f = DomainPolynomial::diagonal(DiagonalPoly::constant(0.75));
        const auto rep = positivity_check(dom, f, {0.25});
        CHECK(rep.rows[0].measured == Catch::Approx(0.75).margin(1e-10));
    }
    SECTION("ball with 1.1 R^2 - x1^2 never dips negative") {
        const auto dom = SemialgebraicDomain::ball(1.0);
        TriPoly f = TriPoly::constant(1.1);
        f -= TriPoly::coordinate(1) * TriPoly::coordinate(1);
        const auto rep = positivity_check(dom, DomainPolynomial::general(f), {0.2, 0.1, 0.05});
        for (const auto& row : rep.rows) {
            CHECK(row.measured >= 0.1 - 1e-9);
            CHECK(row.residual == 0.0);
        }
    }
    SECTION("minimum eigenvalue approaches the classical minimum from above") {
        // f = x1 x3 + 0.501 has classical minimum 0.001 on the cap closure,
        // attained at x1 = -x3 = -1/sqrt(2); the compressed operator stays
        // positive and its minimum converges down toward it.
        const auto dom = SemialgebraicDomain::cap(1.0, 0.0);
        TriPoly f = TriPoly::constant(0.501);
        f += TriPoly::coordinate(1) * TriPoly::coordinate(3);
        const auto rep = positivity_check(dom, DomainPolynomial::general(f),
                                          {0.2, 0.1, 0.05, 0.025});
        double prev_gap = 1.0;
        for (const auto& row : rep.rows) {
            CHECK(row.measured > 0.001);
            const double gap = row.measured - 0.001;
            CHECK(gap < 0.65 * prev_gap);
            prev_gap = gap;
        }
    }
    SECTION("the precondition is enforced by sampling") {
        const auto dom = SemialgebraicDomain::ball(1.0);
        CHECK_THROWS_AS(positivity_check(dom, DomainPolynomial::general(TriPoly::coordinate(3)),
                                         {0.1}),
                        PreconditionError);
    }
}

TEST_CASE("prequantization bound") {
    const auto x3 = DomainPolynomial::general(TriPoly::coordinate(3));
    CHECK(prequant_bound_check(x3, 6.0, 0.21));
    const auto cas = DomainPolynomial::general(TriPoly::casimir());
    CHECK(prequant_bound_check(cas, 6.0, 0.21));

    SECTION("random degree-3 polynomials at l = 10") {
        std::mt19937_64 rng(4242);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        std::uniform_int_distribution<int> deg(0, 3);
        for (int trial = 0; trial < 100; ++trial) {
            TriPoly p;
            for (int term = 0; term < 5; ++term) {
                TriPoly::Key k{deg(rng), deg(rng), deg(rng)};
                if (k[0] + k[1] + k[2] > 3) continue;
                p.add_term(k, dist(rng));
            }
            CHECK(prequant_bound_check(DomainPolynomial::general(p), 10.0, 0.07));
        }
    }
}

TEST_CASE("ball separability of the fundamental matrix element") {
    SECTION("closed-form sums match the dense route at small cutoff") {
        const double l = 3.2;
        const auto rep_report = check_separability_ball(+1, -1, {l});
        const double measured = rep_report.rows[0].measured;

        const int u_cut = 5;  // u(u+2) < 4 l^2 = 40.96
        TruncatedRegularRep rep(u_cut + 1);
        const auto res = multiply_fundamental(rep, +1, -1);
        double acc = 0.0;
        long long dim = 0;
        for (std::size_t col = 0; col < rep.dim(); ++col) {
            if (rep.state_at(col).two_j > u_cut) continue;
            ++dim;
            for (std::size_t row = 0; row < rep.dim(); ++row) {
                if (rep.state_at(row).two_j > u_cut) continue;
                acc += std::norm(res.matrix(row, col));
            }
        }
        CHECK(measured == Catch::Approx(acc / double(dim)).epsilon(1e-12));
    }
    SECTION("residual shrinks toward 1/2 over doubling cutoffs") {
        const auto rep = check_separability_ball(+1, +1, {5.0, 10.0, 20.0, 40.0});
        CHECK(residuals_nonincreasing(rep));
        CHECK(rep.rows.back().measured == Catch::Approx(0.5).margin(0.05 * 0.5));
        for (const auto& row : rep.rows) CHECK(row.reference == 0.5);
    }
}
