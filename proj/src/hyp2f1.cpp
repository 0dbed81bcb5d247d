#include "wsk/hyp2f1.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "wsk/branchphase.hpp"

namespace wsk {

namespace {

bool snaps_to_zero(cplx z) { return std::abs(z) < 1e-9; }

HypValue series_2f1(cplx a, cplx b, cplx c, double x, int max_terms, double tol) {
    cplx term{1.0, 0.0};
    cplx sum{1.0, 0.0};
    double last_ratio = std::abs(x);
    int quiet = 0;
    for (int n = 0; n < max_terms; ++n) {
        const cplx num = (a + double(n)) * (b + double(n));
        if (snaps_to_zero(a + double(n)) || snaps_to_zero(b + double(n)))
            return {sum, 0.0};  // terminating series
        const cplx den = (c + double(n)) * double(n + 1);
        if (snaps_to_zero(c + double(n)))
            throw std::domain_error("gauss_2f1: c_hde reaches a nonpositive integer");
        const cplx prev = term;
        term *= num / den * x;
        sum += term;
        if (std::abs(prev) > 0.0) last_ratio = std::abs(term) / std::abs(prev);
        if (std::abs(term) <= tol * std::abs(sum)) {
            if (++quiet >= 2) {
                const double r = std::min(std::max(last_ratio, std::abs(x)), 0.999999);
                return {sum, std::abs(term) * r / (1.0 - r)};
            }
        } else {
            quiet = 0;
        }
    }
    throw std::runtime_error("gauss_2f1: no convergence within max_terms");
}

}  // namespace

HypValue gauss_2f1(const HypSeriesSpec& spec, double x) {
    if (!(x < 1.0)) throw std::domain_error("gauss_2f1: need x < 1");
    if (std::abs(x) <= 0.5)
        return series_2f1(spec.a, spec.b, spec.c_hde, x, spec.max_terms, spec.tol);
    if (x < 0.0) return gauss_2f1_pfaff(spec, x);
    // x in (1/2, 1): map into (-1, 0) through the same identity
    return gauss_2f1_pfaff(spec, x);
}

HypValue gauss_2f1_pfaff(const HypSeriesSpec& spec, double x) {
    if (!(x < 1.0)) throw std::domain_error("gauss_2f1_pfaff: need x < 1");
    const double y = x / (x - 1.0);
    // the mapped argument can sit close to 1; budget terms for the ratio
    int terms = spec.max_terms;
    if (y > 0.5) {
        const double needed = std::log(std::max(spec.tol, 1e-300)) / std::log(y);
        terms = std::max(terms, int(std::min(2e6, needed + 256.0)));
    }
    const HypValue inner = series_2f1(spec.a, spec.c_hde - spec.b, spec.c_hde, y, terms, spec.tol);
    const cplx pref = principal_power(1.0 - x, -spec.a);
    return {pref * inner.value, std::abs(pref) * inner.error};
}

namespace {

struct BasisParams {
    cplx front;   // exponent of the z^{-front} prefactor
    cplx s1, s2, s3;  // series parameters
};

BasisParams basis_params(const DerivedSpectralData& sd, InfinityBranch branch) {
    if (branch == InfinityBranch::F1)
        return {sd.a, sd.a, sd.a - sd.c_hde + 1.0, sd.a - sd.b + 1.0};
    if (sd.degeneracy == Degeneracy::DegenerateLog)
        throw std::domain_error("basis_at_infinity: second solution is logarithmic here");
    return {sd.b, sd.b, sd.b - sd.c_hde + 1.0, sd.b - sd.a + 1.0};
}

}  // namespace

cplx basis_at_infinity(const DerivedSpectralData& sd, double z, InfinityBranch branch) {
    return basis_at_infinity_deriv(sd, z, branch).value;
}

FValue basis_at_infinity_deriv(const DerivedSpectralData& sd, double z, InfinityBranch branch) {
    if (!(z <= -2.0)) throw std::domain_error("basis_at_infinity: need z <= -2");
    const BasisParams bp = basis_params(sd, branch);
    const double w = 1.0 / z;
    HypSeriesSpec g{bp.s1, bp.s2, bp.s3};
    const cplx gv = gauss_2f1(g, w).value;
    HypSeriesSpec gd{bp.s1 + 1.0, bp.s2 + 1.0, bp.s3 + 1.0};
    const cplx gp = bp.s1 * bp.s2 / bp.s3 * gauss_2f1(gd, w).value;
    const cplx pref = principal_power(z, -bp.front);
    const cplx value = pref * gv;
    const cplx deriv = pref * (-bp.front * gv / z - gp / (z * z));
    return {value, deriv};
}

cplx hde_residual(const DerivedSpectralData& sd, double z, cplx w, cplx wp, cplx wpp) {
    return z * (1.0 - z) * wpp + (sd.c_hde - (sd.a + sd.b + 1.0) * z) * wp - sd.a * sd.b * w;
}

// ---------------------------------------------------------------------------
// Continuation of f by the radial equation, Dormand-Prince 5(4).
// ---------------------------------------------------------------------------

namespace {

constexpr double kFloorZ = -1e-6;

struct OdeCoeffs {
    cplx c1;        // constant part of the first-order coefficient (= c_hde)
    cplx c2;        // linear part: t + 2q - 2
    cplx lambda_eff;
    WeightParameters params;
};

OdeCoeffs ode_coeffs(const DerivedSpectralData& sd) {
    OdeCoeffs oc;
    oc.c1 = sd.c_hde;
    oc.c2 = double(sd.params.t) + 2.0 * sd.params.q - 2.0;
    oc.lambda_eff = sd.lambda_eff;
    oc.params = sd.params;
    return oc;
}

cplx rad_fpp(const OdeCoeffs& oc, double z, cplx f, cplx fp) {
    const cplx A = oc.c1 + oc.c2 * z;
    const cplx B = potential_cf(z, oc.params) - oc.lambda_eff;
    return -(A * fp + B * f) / (z * (1.0 - z));
}

struct State {
    cplx f, fp;
};

State rhs(const OdeCoeffs& oc, double z, const State& y) {
    return {y.fp, rad_fpp(oc, z, y.f, y.fp)};
}

State axpy(const State& y, double h, const State& k) { return {y.f + h * k.f, y.fp + h * k.fp}; }

// One adaptive integration pass. When sink is non-null every accepted step
// is recorded (with f'' from the equation) and max_step_frac limits h to a
// fraction of |z| so the Hermite table stays dense near the singular point.
struct Knot {
    double z;
    cplx f, fp, fpp;
};

State integrate(const OdeCoeffs& oc, double z0, State y, double z1, double rtol,
                std::vector<Knot>* sink = nullptr, double max_step_frac = 0.0) {
    static const double c[7] = {0, 1. / 5, 3. / 10, 4. / 5, 8. / 9, 1., 1.};
    static const double A[7][6] = {
        {},
        {1. / 5},
        {3. / 40, 9. / 40},
        {44. / 45, -56. / 15, 32. / 9},
        {19372. / 6561, -25360. / 2187, 64448. / 6561, -212. / 729},
        {9017. / 3168, -355. / 33, 46732. / 5247, 49. / 176, -5103. / 18656},
        {35. / 384, 0., 500. / 1113, 125. / 192, -2187. / 6784, 11. / 84}};
    static const double E[7] = {35. / 384 - 5179. / 57600, 0., 500. / 1113 - 7571. / 16695,
                                125. / 192 - 393. / 640,   -2187. / 6784 + 92097. / 339200,
                                11. / 84 - 187. / 2100,    -1. / 40};

    const double dir = (z1 > z0) ? 1.0 : -1.0;
    const double atol = 1e-16 * std::max({std::abs(y.f), std::abs(y.fp), 1e-30});
    double z = z0;
    double h = dir * std::min(0.05, std::abs(z1 - z0));
    State k[7];
    k[0] = rhs(oc, z, y);
    if (sink) sink->push_back({z, y.f, y.fp, k[0].fp});

    long steps = 0;
    while (dir * (z1 - z) > 1e-30 * std::abs(z1)) {
        if (++steps > 400000)
            throw std::runtime_error("f continuation: step cap hit near the singular point");
        if (max_step_frac > 0.0)
            h = dir * std::min(std::abs(h), std::max(max_step_frac * std::abs(z), 1e-8));
        if (dir * (z + h - z1) > 0.0) h = z1 - z;

        for (int i = 1; i < 7; ++i) {
            State acc = y;
            for (int j = 0; j < i; ++j) acc = axpy(acc, h * A[i][j], k[j]);
            k[i] = rhs(oc, z + c[i] * h, acc);
        }
        State ynew = y;
        for (int j = 0; j < 6; ++j) ynew = axpy(ynew, h * A[6][j], k[j]);
        cplx ef{0, 0}, efp{0, 0};
        for (int j = 0; j < 7; ++j) {
            ef += h * E[j] * k[j].f;
            efp += h * E[j] * k[j].fp;
        }
        const double sc_f = atol + rtol * std::max(std::abs(y.f), std::abs(ynew.f));
        const double sc_fp = atol + rtol * std::max(std::abs(y.fp), std::abs(ynew.fp));
        const double err = std::sqrt(0.5 * (std::norm(ef / sc_f) + std::norm(efp / sc_fp)));

        if (err <= 1.0) {
            z += h;
            y = ynew;
            k[0] = k[6];  // FSAL
            if (sink) sink->push_back({z, y.f, y.fp, k[0].fp});
        }
        const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
        h *= fac;
    }
    return y;
}

}  // namespace

struct SubdominantSolution::Cache {
    std::mutex build_mutex;
    std::shared_ptr<const std::vector<Knot>> table;
};

SubdominantSolution::SubdominantSolution(const DerivedSpectralData& sd, double anchor_z,
                                         double ode_tol)
    : spectral_(sd), anchor_z_(anchor_z), ode_tol_(ode_tol), cache_(std::make_shared<Cache>()) {
    if (!(anchor_z <= -2.0))
        throw std::invalid_argument("SubdominantSolution: anchor_z must be <= -2");
}

cplx SubdominantSolution::second_derivative(double z, cplx f, cplx fp) const {
    return rad_fpp(ode_coeffs(spectral_), z, f, fp);
}

FValue SubdominantSolution::eval(double z) const {
    if (!(z < 0.0)) throw std::domain_error("f_subdominant: need z < 0");
    if (z > anchor_z_ && z > kFloorZ)
        throw std::domain_error("f_subdominant: too close to the singular point z = 0");

    const double zs = std::min(z, anchor_z_);
    const FValue w1 = basis_at_infinity_deriv(spectral_, zs, InfinityBranch::F1);
    const cplx s = principal_power(1.0 - zs, spectral_.p);
    FValue f0;
    f0.value = s * w1.value;
    f0.derivative = s * (w1.derivative - spectral_.p * w1.value / (1.0 - zs));
    if (z <= anchor_z_) return f0;

    const State y1 = integrate(ode_coeffs(spectral_), anchor_z_, {f0.value, f0.derivative}, z,
                               ode_tol_);
    return {y1.f, y1.fp};
}

FValue SubdominantSolution::eval_cached(double z) const {
    if (!(z < 0.0)) throw std::domain_error("f_subdominant: need z < 0");
    if (z <= anchor_z_) return eval(z);
    if (z > kFloorZ)
        throw std::domain_error("f_subdominant: too close to the singular point z = 0");

    std::shared_ptr<const std::vector<Knot>> table;
    {
        std::lock_guard<std::mutex> lock(cache_->build_mutex);
        if (!cache_->table) {
            auto knots = std::make_shared<std::vector<Knot>>();
            const FValue f0 = eval(anchor_z_);
            integrate(ode_coeffs(spectral_), anchor_z_, {f0.value, f0.derivative}, kFloorZ,
                      std::min(ode_tol_, 1e-11), knots.get(), 0.04);
            cache_->table = knots;
        }
        table = cache_->table;
    }

    const auto& kn = *table;
    auto it = std::upper_bound(kn.begin(), kn.end(), z,
                               [](double zz, const Knot& k) { return zz < k.z; });
    if (it == kn.begin()) ++it;
    if (it == kn.end()) --it;
    const Knot& R = *it;
    const Knot& L = *(it - 1);

    const double h = R.z - L.z;
    const double s = (z - L.z) / h;
    const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
    const double H0 = 1 - 10 * s3 + 15 * s4 - 6 * s5;
    const double H1 = s - 6 * s3 + 8 * s4 - 3 * s5;
    const double H2 = 0.5 * (s2 - 3 * s3 + 3 * s4 - s5);
    const double H3 = 10 * s3 - 15 * s4 + 6 * s5;
    const double H4 = -4 * s3 + 7 * s4 - 3 * s5;
    const double H5 = 0.5 * (s3 - 2 * s4 + s5);
    const double d0 = -30 * s2 + 60 * s3 - 30 * s4;
    const double d1 = 1 - 18 * s2 + 32 * s3 - 15 * s4;
    const double d2 = 0.5 * (2 * s - 9 * s2 + 12 * s3 - 5 * s4);
    const double d3 = 30 * s2 - 60 * s3 + 30 * s4;
    const double d4 = -12 * s2 + 28 * s3 - 15 * s4;
    const double d5 = 0.5 * (3 * s2 - 8 * s3 + 5 * s4);

    FValue out;
    out.value = L.f * H0 + h * L.fp * H1 + h * h * L.fpp * H2 + R.f * H3 + h * R.fp * H4 +
                h * h * R.fpp * H5;
    out.derivative = (L.f * d0 + h * L.fp * d1 + h * h * L.fpp * d2 + R.f * d3 + h * R.fp * d4 +
                      h * h * R.fpp * d5) /
                     h;
    return out;
}

FValue f_subdominant(const SubdominantSolution& sol, double z) { return sol.eval(z); }

}  // namespace wsk
