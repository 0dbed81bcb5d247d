#include "wsk/spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace wsk {

namespace {

constexpr double int_tol = 1e-9;

bool near_integer(cplx z, long long& n) {
    if (std::abs(z.imag()) > int_tol) return false;
    const double r = std::round(z.real());
    if (std::abs(z.real() - r) > int_tol) return false;
    n = (long long)r;
    return true;
}

Degeneracy classify(cplx a, cplx b) {
    long long gap = 0, bi = 0;
    if (!near_integer(a - b, gap)) return Degeneracy::NonDegenerate;
    // gap >= 0 by the root labeling. The second basis solution stays free of
    // logarithms only when b is a nonpositive integer terminating its series
    // early enough, which for gap >= 1 additionally needs a > 0.
    const bool b_nonpos_int = near_integer(b, bi) && bi <= 0;
    if (gap == 0) return b_nonpos_int ? Degeneracy::DegenerateNonLog : Degeneracy::DegenerateLog;
    return (b_nonpos_int && a.real() > int_tol) ? Degeneracy::DegenerateNonLog
                                                : Degeneracy::DegenerateLog;
}

}  // namespace

WeightParameters::WeightParameters(int t_, int k_, cplx q_, cplx lambda_K_)
    : t(t_), k(k_), q(q_), lambda_K(lambda_K_) {
    if (((t - k) % 2 + 2) % 2 != 0)
        throw std::invalid_argument("WeightParameters: t and k must share parity");
}

DerivedSpectralData derive(const WeightParameters& params, PChoice choice) {
    DerivedSpectralData out;
    out.params = params;
    out.p_choice = choice;
    out.m = params.m();

    const double t = params.t;
    out.lambda_eff = params.lambda_K - 0.5 * t * (1.0 - 0.5 * t);
    out.p = (choice == PChoice::RootQ) ? params.q : 0.5 * double(params.t + params.k) + params.q;
    out.c_hde = 1.0 + 0.5 * double(params.k - params.t);

    const cplx sum = 2.0 * out.p - t - 2.0 * params.q + 1.0;
    const cplx prod = (out.p - params.q) * out.c_hde + out.lambda_eff;
    const cplx disc = std::sqrt(sum * sum - 4.0 * prod);  // principal sqrt: Re >= 0
    out.a = 0.5 * (sum + disc);
    out.b = 0.5 * (sum - disc);
    if (out.a.real() < out.b.real() ||
        (out.a.real() == out.b.real() && out.a.imag() < out.b.imag()))
        std::swap(out.a, out.b);

    out.alpha_f = std::min((out.p - out.a).real(), (out.p - out.b).real());
    out.alpha_K = -0.5 * t - params.q.real() + out.alpha_f;
    out.degeneracy = classify(out.a, out.b);
    return out;
}

std::pair<cplx, cplx> indicial_exponents(const WeightParameters& params, SingularPoint where) {
    switch (where) {
        case SingularPoint::Zero:
            return {cplx{0.0, 0.0}, cplx{double(params.m()), 0.0}};
        case SingularPoint::One:
            return {params.q, 0.5 * double(params.t + params.k) + params.q};
        case SingularPoint::Infinity: {
            // r^2 + (t + 2q - 1) r + lambda_eff - q(1 - t - q) = 0
            const double t = params.t;
            const cplx lam_eff = params.lambda_K - 0.5 * t * (1.0 - 0.5 * t);
            const cplx lin = t + 2.0 * params.q - 1.0;
            const cplx con = lam_eff - params.q * (1.0 - t - params.q);
            const cplx disc = std::sqrt(lin * lin - 4.0 * con);
            return {0.5 * (-lin + disc), 0.5 * (-lin - disc)};
        }
    }
    throw std::logic_error("indicial_exponents: bad singular point");
}

cplx potential_cf(double z, const WeightParameters& params) {
    const double t = params.t, k = params.k;
    return params.q * (-(1.0 - t - params.q) * z + (1.0 - 0.5 * t + 0.5 * k)) / (1.0 - z);
}

cplx potential_cf_x(double x, const WeightParameters& params) {
    const double t = params.t, k = params.k;
    return params.q * ((1.0 - t - params.q) * x + 2.0 * (2.0 - t + k)) / (x + 4.0);
}

ConvergenceReport convergence_report(const WeightParameters& params, double input_growth_C,
                                     PChoice choice) {
    const DerivedSpectralData data = derive(params, choice);
    ConvergenceReport rep;
    rep.alpha_K = data.alpha_K;
    rep.growth_C = input_growth_C;
    rep.periodized = 2.0 * data.alpha_K < -1.0;
    rep.automorphic = data.alpha_K < -1.0;
    rep.operator_ok = data.alpha_K < std::min(-1.0, -input_growth_C);
    rep.local_abs_conv = std::abs(params.t - params.k) < 4;
    rep.pv_required = !rep.local_abs_conv;
    return rep;
}

}  // namespace wsk
