#include "test_main.hpp"

#include <cmath>

#include "wsk/branchphase.hpp"
#include "wsk/hyp2f1.hpp"

using namespace wsk;

namespace {

// least-squares slope of log|g| against log|z|
template <typename F>
double loglog_slope(F&& g, double lo, double hi, int n = 12) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        const double z = lo * std::pow(hi / lo, double(i) / (n - 1));
        const double x = std::log(std::abs(z)), y = std::log(std::abs(g(z)));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// finite-difference f'' from the integrator's derivative output
cplx fd_fpp(const SubdominantSolution& sol, double z, double h) {
    return (sol.eval(z + h).derivative - sol.eval(z - h).derivative) / (2.0 * h);
}

double ode_residual_scaled(const SubdominantSolution& sol, double z) {
    const auto& sd = sol.spectral();
    const auto& pr = sd.params;
    const double h = 1e-5 * std::max(1.0, std::abs(z));
    const FValue f = sol.eval(z);
    const cplx fpp = fd_fpp(sol, z, h);
    const cplx A = sd.c_hde + (double(pr.t) + 2.0 * pr.q - 2.0) * z;
    const cplx B = potential_cf(z, pr) - sd.lambda_eff;
    const cplx res = z * (1.0 - z) * fpp + A * f.derivative + B * f.value;
    const double scale = std::max({std::abs(z * (1.0 - z) * fpp), std::abs(A * f.derivative),
                                   std::abs(B * f.value), 1e-300});
    return std::abs(res) / scale;
}

}  // namespace

TEST_CASE("gauss series basics") {
    CHECK(std::abs(gauss_2f1({0.7, cplx(1.2, 0.4), 2.1}, 0.0).value - 1.0) < 1e-15);

    // oracle identity: 2F1(1,1;2;x) = -ln(1-x)/x, so the value at -1 is ln 2
    const auto v = gauss_2f1({1.0, 1.0, 2.0}, -1.0);
    CHECK(std::abs(v.value - std::log(2.0)) < 1e-13);

    // parameter symmetry
    wsk_test::Rng rng(11);
    for (int it = 0; it < 40; ++it) {
        const cplx a = rng.uniform_cplx(-2, 2), b = rng.uniform_cplx(-2, 2);
        const cplx c = rng.uniform_cplx(0.5, 3);
        const double x = rng.uniform(-0.45, 0.45);
        CHECK(std::abs(gauss_2f1({a, b, c}, x).value - gauss_2f1({b, a, c}, x).value) < 1e-13);
    }

    CHECK_THROWS(gauss_2f1({1.0, 1.0, 2.0}, 1.5));
    // c reached as a nonpositive integer before the series terminates
    CHECK_THROWS(gauss_2f1({0.3, 0.9, -2.0}, 0.2));
    // but a terminating numerator shields it: a=-1 stops at the linear term
    CHECK(std::abs(gauss_2f1({-1.0, 1.0, -2.0}, 0.4).value - (1.0 - 0.4 * (1.0 / -2.0))) < 1e-14);
}

TEST_CASE("mapped-argument path agrees on the overlap") {
    wsk_test::Rng rng(13);
    for (int it = 0; it < 40; ++it) {
        const cplx a = rng.uniform_cplx(-1.5, 1.5), b = rng.uniform_cplx(-1.5, 1.5);
        const cplx c = rng.uniform_cplx(0.7, 2.5);
        const double x = rng.uniform(-0.5, -0.25);
        const cplx direct = gauss_2f1({a, b, c}, x).value;
        const cplx mapped = gauss_2f1_pfaff({a, b, c}, x).value;
        CHECK(std::abs(direct - mapped) <= 1e-10 * (1.0 + std::abs(direct)));
    }
    // far negative arguments run through the mapped path
    const auto far = gauss_2f1({1.0, 1.0, 2.0}, -1e4);
    CHECK(std::abs(far.value - (-std::log(1.0 + 1e4) / -1e4)) < 1e-12);
}

TEST_CASE("basis at infinity") {
    // reference set: F1(z) = e^{-i pi/2} |z|^{-1/2} F(.., 1/z)
    const auto sd = derive(WeightParameters(0, 0, 0.0, 0.25));
    const cplx f1 = basis_at_infinity(sd, -1e6, InfinityBranch::F1);
    const cplx expected = cplx(0, -1) * 1e-3 * gauss_2f1({0.5, 0.5, 1.0}, -1e-6).value;
    CHECK(std::abs(f1 - expected) < 1e-15);
    CHECK(std::abs(f1 - cplx(0, -1) * 1e-3 * (1.0 - 2.5e-7)) < 1e-9);

    // log-degenerate second solution refuses
    CHECK_THROWS(basis_at_infinity(sd, -100.0, InfinityBranch::F2));

    // slopes reproduce the exponents in a non-degenerate configuration
    const auto nd = derive(WeightParameters(2, 0, cplx(0.1, 0.2), cplx(-1.7, 0.0)));
    CHECK(nd.degeneracy == Degeneracy::NonDegenerate);
    const double s1 = loglog_slope(
        [&](double z) { return basis_at_infinity(nd, z, InfinityBranch::F1); }, -1e3, -1e6);
    CHECK(std::abs(s1 - (-nd.a.real())) < 0.05);
    const double s2 = loglog_slope(
        [&](double z) { return basis_at_infinity(nd, z, InfinityBranch::F2); }, -1e3, -1e6);
    CHECK(std::abs(s2 - (-nd.b.real())) < 0.05);

    // terminating second solution in the non-logarithmic degenerate class
    const auto dnl = derive(WeightParameters(0, 0, 0.0, -2.0));
    CHECK(dnl.degeneracy == Degeneracy::DegenerateNonLog);
    const double s3 = loglog_slope(
        [&](double z) { return basis_at_infinity(dnl, z, InfinityBranch::F2); }, -1e3, -1e6);
    CHECK(std::abs(s3 - (-dnl.b.real())) < 0.05);
}

TEST_CASE("subdominant solution: residuals and asymptotics") {
    const WeightParameters params(2, 0, cplx(0.3, 0.2), cplx(-1.7, 0.0));
    const SubdominantSolution sol(derive(params));

    for (double z : {-0.3, -3.0, -30.0}) CHECK(ode_residual_scaled(sol, z) < 1e-8);

    const double slope = loglog_slope([&](double z) { return sol.eval(z).value; }, -1e3, -1e6);
    CHECK(std::abs(slope - sol.spectral().alpha_f) < 0.05);

    const double dslope =
        loglog_slope([&](double z) { return sol.eval(z).derivative; }, -1e3, -1e6);
    CHECK(std::abs(dslope - (sol.spectral().alpha_f - 1.0)) < 0.08);

    CHECK_THROWS(sol.eval(0.5));
    CHECK_THROWS(sol.eval(-1e-8));
}

TEST_CASE("local exponent at the origin for positive weight gap") {
    // m = 1: the exponent-0 local solution is generically present, so |f|
    // flattens toward z = 0
    const WeightParameters params(2, 0, cplx(0.3, 0.2), cplx(-1.7, 0.0));
    const SubdominantSolution sol(derive(params));
    const double slope = loglog_slope([&](double z) { return sol.eval(z).value; }, -1e-3, -3e-6, 8);
    CHECK(std::abs(slope) < 0.05);
}

TEST_CASE("anchor consistency") {
    const auto sd = derive(WeightParameters(2, 0, cplx(0.3, 0.2), cplx(-1.7, 0.0)));
    const SubdominantSolution near_anchor(sd, -8.0, 1e-10);
    const SubdominantSolution far_anchor(sd, -16.0, 1e-10);
    for (double z : {-7.0, -2.0, -0.5, -0.05}) {
        const cplx a = near_anchor.eval(z).value;
        const cplx b = far_anchor.eval(z).value;
        CHECK(std::abs(a - b) <= 10.0 * 1e-10 * std::abs(a));
    }
}

TEST_CASE("hde residual") {
    // k > t keeps c_hde a positive integer, so the direct series applies
    const auto sd = derive(WeightParameters(0, 2, cplx(0.1, -0.4), cplx(-1.3, 0.2)));
    CHECK(std::abs(hde_residual(sd, -0.7, 0, 0, 0)) == 0.0);

    // term-wise series oracle at x = -0.3
    const double x = -0.3;
    cplx w = 0, wp = 0, wpp = 0, term = 1.0;
    for (int n = 0; n < 200; ++n) {
        w += term;
        if (n >= 1) wp += double(n) * term / x;
        if (n >= 2) wpp += double(n) * double(n - 1) * term / (x * x);
        term *= (sd.a + double(n)) * (sd.b + double(n)) / ((sd.c_hde + double(n)) * double(n + 1)) * x;
    }
    CHECK(std::abs(hde_residual(sd, x, w, wp, wpp)) < 1e-10);

    // f rebuilt as (1-z)^{-p} w must satisfy the equation for either root
    const SubdominantSolution s1(derive(WeightParameters(0, 2, cplx(0.1, -0.4), cplx(-1.3, 0.2)),
                                        PChoice::RootQ));
    const double z = -2.4, h = 1e-5;
    const FValue f = s1.eval(z);
    const cplx fpp = fd_fpp(s1, z, h);
    const cplx p = s1.spectral().p;
    const cplx om = 1.0 - z;
    const cplx winv = principal_power(om, -p);
    const cplx wv = winv * f.value;
    const cplx wd = winv * (f.derivative + p * f.value / om);
    const cplx wdd = winv * (fpp + 2.0 * p * f.derivative / om + p * (p + 1.0) * f.value / (om * om));
    const cplx res = hde_residual(s1.spectral(), z, wv, wd, wdd);
    CHECK(std::abs(res) <= 1e-7 * std::max(1.0, std::abs(sd.a * sd.b * wv)));
}

TEST_CASE("both transformation-exponent roots give the same line") {
    const WeightParameters params(2, 0, cplx(0.1, -0.4), cplx(-1.3, 0.2));
    const SubdominantSolution s1(derive(params, PChoice::RootQ));
    const SubdominantSolution s2(derive(params, PChoice::RootTK2Q));
    const cplx r1 = s1.eval(-5.0).value / s2.eval(-5.0).value;
    const cplx r2 = s1.eval(-17.0).value / s2.eval(-17.0).value;
    CHECK(std::abs(r1 - r2) <= 1e-9 * std::abs(r1));
}

TEST_CASE("x-coordinate form of the radial equation") {
    const WeightParameters params(4, 2, cplx(0.25, 0.15), cplx(-2.2, 0.3));
    const SubdominantSolution sol(derive(params));
    const auto& sd = sol.spectral();
    wsk_test::Rng rng(43);
    for (int it = 0; it < 20; ++it) {
        const double z = -rng.uniform(0.05, 40.0);
        const double x = -4.0 * z;
        const FValue f = sol.eval(z);
        const cplx fpp = sol.second_derivative(z, f.value, f.derivative);
        // z-form residual
        const cplx A = sd.c_hde + (double(params.t) + 2.0 * params.q - 2.0) * z;
        const cplx rz = z * (1.0 - z) * fpp + A * f.derivative +
                        (potential_cf(z, params) - sd.lambda_eff) * f.value;
        // x-form residual with g(x) = f(-x/4)
        const cplx gp = -f.derivative / 4.0, gpp = fpp / 16.0;
        const cplx rx = -x * (x + 4.0) * gpp +
                        ((double(params.t) + 2.0 * params.q - 2.0) * x +
                         2.0 * (double(params.t - params.k) - 2.0)) *
                            gp +
                        (potential_cf_x(x, params) - sd.lambda_eff) * f.value;
        CHECK(std::abs(rz - rx) <= 1e-10 * (1.0 + std::abs(rz)));
    }
}

TEST_CASE("cached evaluation matches the direct path") {
    const WeightParameters params(0, 2, cplx(0.2, 0.1), cplx(-1.9, 0.1));  // m = -1
    const SubdominantSolution sol(derive(params));
    wsk_test::Rng rng(59);
    for (int it = 0; it < 40; ++it) {
        const double z = -std::pow(10.0, rng.uniform(-3.9, 0.9));
        const FValue a = sol.eval(z);
        const FValue b = sol.eval_cached(z);
        CHECK(std::abs(a.value - b.value) <= 1e-8 * std::abs(a.value));
    }
    // below the anchor the cached path falls through to the series
    const FValue a = sol.eval(-12.0), b = sol.eval_cached(-12.0);
    CHECK(a.value == b.value);
}
