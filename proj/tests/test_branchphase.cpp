#include "test_main.hpp"

#include <cmath>

#include "wsk/branchphase.hpp"

using namespace wsk;

TEST_CASE("principal branch conventions") {
    CHECK(principal_arg(cplx(-1.0, 0.0)) == doctest::Approx(std::numbers::pi));
    CHECK(principal_arg(cplx(-1.0, -0.0)) == doctest::Approx(std::numbers::pi));
    CHECK(principal_arg(cplx(1.0, 0.0)) == 0.0);

    CHECK(std::abs(principal_power(cplx(1, 0), cplx(0.3, -2.0)) - 1.0) < 1e-15);
    // Arg(-1) = +pi forces (-1)^(1/2) = i
    CHECK(std::abs(principal_power(cplx(-1, 0), 0.5) - cplx(0, 1)) < 1e-15);
    CHECK(std::abs(principal_power(cplx(0, 2), 2.0) - cplx(-4, 0)) < 1e-14);
    CHECK_THROWS(principal_power(cplx(0, 0), 1.0));
}

TEST_CASE("phase integers") {
    const HPoint t1(0.3, 1.2), t2(-0.4, 0.7);

    // the family (-1 b; 0 -1) gives n_g = 1
    for (long long b : {-3LL, 0LL, 3LL}) {
        const auto pf = phase_factors(ModularMatrix(-1, b, 0, -1), t1, t2, 3, 1);
        CHECK(pf.raw.n_g == 1);
    }
    const auto id = phase_factors(ModularMatrix::identity(), t1, t2, 3, 1);
    CHECK(id.raw.n_g == 0);
    CHECK(id.raw.n_mult == 0);
    CHECK(id.raw.n_d == 0);
    CHECK(std::abs(id.total() - 1.0) < 1e-15);

    CHECK_THROWS(phase_factors(ModularMatrix::identity(), t1, t1, 2, 0));

    // same parity makes every factor unity
    wsk_test::Rng rng(23);
    for (int it = 0; it < 100; ++it) {
        const int t = rng.uniform_int(-5, 5);
        const int k = t - 2 * rng.uniform_int(-3, 3);
        const auto pf = phase_factors(rng.matrix(), rng.point(), rng.point(), t, k);
        CHECK(std::abs(pf.eps_conj - 1.0) < 1e-15);
        CHECK(std::abs(pf.eps_mult - 1.0) < 1e-15);
        CHECK(std::abs(pf.eps_d - 1.0) < 1e-15);
    }
}

TEST_CASE("covariant factor values") {
    // t = k = 0, q = 0 collapses every exponent
    CHECK(std::abs(covariant_p(HPoint(0.9, 0.4), HPoint(-1.2, 2.3), {0, 0, 0.0}) - 1.0) < 1e-14);

    // hand value: (v1 v2) (2i/3i)^2 = 8/9 at (i, 2i), t=k=2
    const cplx p = covariant_p(HPoint(0, 1), HPoint(0, 2), {2, 2, 0.0});
    CHECK(std::abs(p - cplx(8.0 / 9.0, 0.0)) < 1e-14);

    CHECK_THROWS(covariant_p(HPoint(0, 1), HPoint(0, 1), {4, 0, 0.0}));

    // factored and compact paths agree
    wsk_test::Rng rng(31);
    for (int it = 0; it < 200; ++it) {
        const HPoint a = rng.point(), b = rng.point();
        const CovariantInputs in{rng.uniform_int(-4, 4), rng.uniform_int(-4, 4),
                                 rng.uniform_cplx(-1.5, 1.5)};
        const cplx pf = covariant_p(a, b, in, PForm::Factored);
        const cplx pc = covariant_p(a, b, in, PForm::Compact);
        CHECK(std::abs(pf - pc) <= 1e-12 * std::abs(pc));
    }
}

TEST_CASE("full covariance law with phases") {
    wsk_test::Rng rng(7);
    int odd_diff_seen = 0, odd_sum_seen = 0;
    for (int it = 0; it < 500; ++it) {
        const ModularMatrix g = rng.matrix();
        const HPoint t1 = rng.point(), t2 = rng.point();
        const int t = rng.uniform_int(-4, 4), k = rng.uniform_int(-4, 4);
        const cplx q = rng.uniform_cplx(-1.0, 1.0);
        if ((t - k) % 2 != 0) ++odd_diff_seen;
        if ((t + k) % 2 != 0) ++odd_sum_seen;

        const CovariantInputs in{t, k, q};
        const cplx lhs = covariant_p(mobius_apply(g, t1), mobius_apply(g, t2), in);
        const auto pf = phase_factors(g, t1, t2, t, k);
        const cplx rhs = pf.total() * automorphy_factor(t, g, t1) /
                         automorphy_factor(k, g, t2) * covariant_p(t1, t2, in);
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(rhs));
        if ((t - k) % 2 == 0) CHECK(std::abs(pf.total() - 1.0) < 1e-15);
    }
    CHECK(odd_diff_seen > 50);
    CHECK(odd_sum_seen > 50);

    // negative control: dropping the phase factors must break odd-parity cases
    int broken = 0;
    wsk_test::Rng rng2(7);
    for (int it = 0; it < 200; ++it) {
        const ModularMatrix g = rng2.matrix();
        const HPoint t1 = rng2.point(), t2 = rng2.point();
        const int t = rng2.uniform_int(-4, 4), k = rng2.uniform_int(-4, 4);
        const cplx q = rng2.uniform_cplx(-1.0, 1.0);
        if ((t - k) % 2 == 0) continue;
        const CovariantInputs in{t, k, q};
        const auto pf = phase_factors(g, t1, t2, t, k);
        if (std::abs(pf.total() - 1.0) < 0.5) continue;  // phase happened to be trivial
        const cplx lhs = covariant_p(mobius_apply(g, t1), mobius_apply(g, t2), in);
        const cplx rhs_nophase =
            automorphy_factor(t, g, t1) / automorphy_factor(k, g, t2) * covariant_p(t1, t2, in);
        if (std::abs(lhs - rhs_nophase) > 1e-6 * std::abs(rhs_nophase)) ++broken;
    }
    CHECK(broken > 10);
}

TEST_CASE("base invariance and magnitude symmetry") {
    wsk_test::Rng rng(41);
    for (int it = 0; it < 100; ++it) {
        const ModularMatrix g = rng.matrix();
        const HPoint t1 = rng.point(), t2 = rng.point();
        const auto base = [](const HPoint& a, const HPoint& b) {
            return 4.0 * a.v * b.v / std::norm(a.tau() - b.tau_bar());
        };
        CHECK(base(mobius_apply(g, t1), mobius_apply(g, t2)) ==
              doctest::Approx(base(t1, t2)).epsilon(1e-12));

        const CovariantInputs in{rng.uniform_int(-4, 4), rng.uniform_int(-4, 4),
                                 rng.uniform_cplx(-1.0, 1.0)};
        const double m1 = std::abs(covariant_p(t1, t2, in));
        const double m2 = std::abs(covariant_p(t2, t1, in));
        CHECK(m1 == doctest::Approx(m2).epsilon(1e-12));
    }
}

TEST_CASE("logarithmic derivatives") {
    const CovariantInputs flat{0, 0, 0.0};
    const auto d0 = logderiv_p(HPoint(0.2, 1.0), HPoint(-0.5, 2.0), flat);
    CHECK(std::abs(d0.d_tau1) < 1e-15);
    CHECK(std::abs(d0.d_tau1bar) < 1e-15);
    CHECK(std::abs(d0.d2_mixed) < 1e-15);

    // second mixed derivative is -(t/2+q)/(4 v1^2)
    const auto d2 = logderiv_p(HPoint(0.4, 1.3), HPoint(0.0, 2.0), {2, 0, 0.0});
    CHECK(std::abs(d2.d2_mixed - cplx(-1.0 / (4.0 * 1.3 * 1.3), 0.0)) < 1e-15);

    // central-difference oracle at (i, 2i), t=2, k=0, q=1: differences of P
    // itself divided by P, which stays clear of logarithm branch jumps
    const CovariantInputs in{2, 0, 1.0};
    const HPoint t1(0.0, 1.0), t2(0.0, 2.0);
    const double h = 1e-5;
    const cplx p0 = covariant_p(t1, t2, in);
    auto pval = [&](double u, double v) { return covariant_p(HPoint(u, v), t2, in); };
    const cplx du = (pval(h, 1.0) - pval(-h, 1.0)) / (2.0 * h * p0);
    const cplx dv = (pval(0.0, 1.0 + h) - pval(0.0, 1.0 - h)) / (2.0 * h * p0);
    const cplx fd_dtau = 0.5 * (du - cplx(0, 1) * dv);
    const cplx fd_dtaubar = 0.5 * (du + cplx(0, 1) * dv);
    const auto ld = logderiv_p(t1, t2, in);
    CHECK(std::abs(ld.d_tau1 - fd_dtau) < 1e-6);
    CHECK(std::abs(ld.d_tau1bar - fd_dtaubar) < 1e-6);
}

TEST_CASE("auxiliary functions") {
    wsk_test::Rng rng(57);
    for (int it = 0; it < 100; ++it) {
        const HPoint t1 = rng.point(), t2 = rng.point();
        const CovariantInputs in{rng.uniform_int(-4, 4), rng.uniform_int(-4, 4),
                                 rng.uniform_cplx(-1.0, 1.0)};
        const auto q12 = aux_q(t1, t2, in);
        const auto ld = logderiv_p(t1, t2, in);
        const cplx shift{0.0, double(in.t) / (4.0 * t1.v)};
        CHECK(std::abs(ld.d_tau1 - (q12.q1 + shift)) < 1e-12 * (1.0 + std::abs(ld.d_tau1)));
        CHECK(std::abs(ld.d_tau1bar - (q12.q2 + shift)) < 1e-12 * (1.0 + std::abs(ld.d_tau1bar)));

        // weight-2 covariance in tau1
        const ModularMatrix g = rng.matrix();
        const auto qg = aux_q(mobius_apply(g, t1), mobius_apply(g, t2), in);
        const cplx den = double(g.c) * t1.tau() + double(g.d);
        const cplx den_bar = double(g.c) * t1.tau_bar() + double(g.d);
        CHECK(std::abs(qg.q1 - den * den * q12.q1) <= 1e-10 * (1.0 + std::abs(qg.q1)));
        CHECK(std::abs(qg.q2 - den_bar * den_bar * q12.q2) <= 1e-10 * (1.0 + std::abs(qg.q2)));
    }

    // q = 0 kills the second function
    const auto q0 = aux_q(HPoint(0.1, 1.0), HPoint(0.7, 0.6), {4, 2, 0.0});
    CHECK(std::abs(q0.q2) < 1e-15);
}
