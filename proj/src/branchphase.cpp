#include "wsk/branchphase.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wsk {

namespace {
constexpr double pi = std::numbers::pi;

// exact +/-1 from exp(i pi n w) for integer n, w
cplx pm_one(long long parity) { return (parity % 2 == 0) ? cplx{1.0, 0.0} : cplx{-1.0, 0.0}; }

int round_branch_integer(double lhs, double rhs_sum, const char* what) {
    const double n_real = (lhs - rhs_sum) / (2.0 * pi);
    const int n = int(std::lround(n_real));
    if (std::abs(n_real - double(n)) > 1e-9 / (2.0 * pi))
        throw std::runtime_error(std::string("phase_factors: branch relation violated for ") + what);
    return n;
}
}  // namespace

double principal_arg(cplx z) {
    double a = std::arg(z);
    if (a <= -pi) a = pi;
    return a;
}

cplx principal_power(cplx base, cplx exponent) {
    if (base == cplx{0.0, 0.0}) throw std::domain_error("principal_power: zero base");
    const cplx logb{std::log(std::abs(base)), principal_arg(base)};
    return std::exp(exponent * logb);
}

PhaseFactors phase_factors(const ModularMatrix& g, const HPoint& t1, const HPoint& t2,
                           int t, int k) {
    if (t1.u == t2.u && t1.v == t2.v)
        throw std::domain_error("phase_factors: diagonal input");

    const cplx tau2 = t2.tau(), tau2b = t2.tau_bar();
    const cplx A = double(g.c) * tau2 + double(g.d);
    const cplx Ab = double(g.c) * tau2b + double(g.d);

    PhaseIntegers raw;
    raw.n_g = int(std::floor((principal_arg(A) + principal_arg(Ab) + pi) / (2.0 * pi)));

    const cplx w1 = (tau2b - t1.tau()) / (tau2 - t1.tau());
    const cplx w2 = A / Ab;
    raw.n_mult = round_branch_integer(principal_arg(w1 * w2),
                                      principal_arg(w1) + principal_arg(w2), "n_mult");
    raw.n_d = round_branch_integer(principal_arg(w2),
                                   principal_arg(A) - principal_arg(Ab), "n_d");

    PhaseFactors out;
    out.raw = raw;
    out.eps_conj = pm_one((long long)raw.n_g * (t + k));
    out.eps_mult = pm_one((long long)raw.n_mult * (t - k));
    out.eps_d = pm_one((long long)raw.n_d * (t - k));
    return out;
}

cplx covariant_p(const HPoint& t1, const HPoint& t2, const CovariantInputs& in, PForm form) {
    const cplx tau1 = t1.tau(), tau2 = t2.tau();
    const cplx tau1b = t1.tau_bar(), tau2b = t2.tau_bar();
    const double m = in.half_diff();
    if (m > 0.0 && tau1 == tau2)
        throw std::domain_error("covariant_p: diagonal pole (t > k)");

    const double vv = t1.v * t2.v;
    const cplx two_i{0.0, 2.0};
    const cplx ratio = (tau2b - tau1) / (tau2 - tau1);

    if (form == PForm::Factored) {
        const cplx p_w = principal_power(vv, 0.5 * double(in.t)) *
                         principal_power(two_i / (tau1 - tau2b), double(in.t)) *
                         principal_power(ratio, m);
        const cplx p_q = principal_power(4.0 * vv / std::norm(tau1 - tau2b), in.q);
        return p_w * p_q;
    }
    return principal_power(vv, 0.5 * double(in.t) + in.q) *
           principal_power(two_i / (tau1 - tau2b), double(in.t) + in.q) *
           principal_power(-two_i / (tau1b - tau2), in.q) *
           principal_power(ratio, m);
}

LogDerivP logderiv_p(const HPoint& t1, const HPoint& t2, const CovariantInputs& in) {
    const cplx tau1 = t1.tau(), tau2 = t2.tau();
    const cplx tau1b = t1.tau_bar(), tau2b = t2.tau_bar();
    if (tau1 == tau2) throw std::domain_error("logderiv_p: diagonal input");

    const double th = 0.5 * double(in.t), kh = 0.5 * double(in.k);
    LogDerivP out;
    out.d_tau1 = (th + in.q) / (tau1 - tau1b) - (th + kh + in.q) / (tau1 - tau2b) -
                 (th - kh) / (tau1 - tau2);
    out.d_tau1bar = -(th + in.q) / (tau1 - tau1b) - in.q / (tau1b - tau2);
    out.d2_mixed = -(th + in.q) / (4.0 * t1.v * t1.v);
    return out;
}

AuxQ aux_q(const HPoint& t1, const HPoint& t2, const CovariantInputs& in) {
    const cplx tau1 = t1.tau(), tau2 = t2.tau();
    const cplx tau1b = t1.tau_bar(), tau2b = t2.tau_bar();
    if (tau1 == tau2) throw std::domain_error("aux_q: diagonal input");

    const double th = 0.5 * double(in.t), kh = 0.5 * double(in.k);
    const cplx i_over_2v{0.0, 1.0 / (2.0 * t1.v)};
    AuxQ out;
    out.q1 = -(th + kh + in.q) / (tau1 - tau2b) - (th - kh) / (tau1 - tau2) -
             (double(in.t) + in.q) * i_over_2v;
    out.q2 = -in.q / (tau1b - tau2) + in.q * i_over_2v;
    return out;
}

}  // namespace wsk
