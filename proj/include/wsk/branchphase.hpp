#pragma once

#include "wsk/halfplane.hpp"

namespace wsk {

// Principal argument in (-pi, pi]. std::arg returns -pi on the negative real
// axis when the imaginary part is -0.0; that case is folded back to +pi.
double principal_arg(cplx z);

// exp(w (ln|z| + i Arg z)) with the (-pi, pi] convention above.
cplx principal_power(cplx base, cplx exponent);

// Branch-correction integers for the covariance law. n_g is 1 exactly for
// the family (-1 b; 0 -1), n_mult and n_d are the unique integers closing
// the argument relations for products and quotients.
struct PhaseIntegers {
    int n_g = 0;
    int n_mult = 0;
    int n_d = 0;
};

struct PhaseFactors {
    cplx eps_conj{1.0, 0.0};
    cplx eps_mult{1.0, 0.0};
    cplx eps_d{1.0, 0.0};
    PhaseIntegers raw;

    cplx total() const { return eps_conj * eps_mult * eps_d; }
};

// Throws std::domain_error when t1 == t2 (the product auxiliary is
// undefined on the diagonal).
PhaseFactors phase_factors(const ModularMatrix& g, const HPoint& t1, const HPoint& t2,
                           int t, int k);

struct CovariantInputs {
    int t = 0;
    int k = 0;
    cplx q{0.0, 0.0};

    double half_diff() const { return 0.5 * double(t - k); }
};

enum class PForm { Factored, Compact };

// The two-point covariant weight factor. The compact product is the default
// evaluation path; the factored split is kept for cross-checks. Throws on
// the diagonal when t > k (pole).
cplx covariant_p(const HPoint& t1, const HPoint& t2, const CovariantInputs& in,
                 PForm form = PForm::Compact);

struct LogDerivP {
    cplx d_tau1;      // d ln P / d tau1
    cplx d_tau1bar;   // d ln P / d conj(tau1)
    cplx d2_mixed;    // d^2 ln P / d tau1 d conj(tau1) = -(t/2+q)/(4 v1^2)
};

LogDerivP logderiv_p(const HPoint& t1, const HPoint& t2, const CovariantInputs& in);

struct AuxQ {
    cplx q1;
    cplx q2;
};

// Weight-2 covariant pieces of the logarithmic derivatives:
//   d ln P / d tau1 = Q1 + i t / (4 v1),  d ln P / d conj(tau1) = Q2 + i t / (4 v1).
AuxQ aux_q(const HPoint& t1, const HPoint& t2, const CovariantInputs& in);

}  // namespace wsk
