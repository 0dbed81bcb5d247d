#pragma once

#include <utility>

#include "wsk/halfplane.hpp"

namespace wsk {

// One operator instance is fixed by (t, k, q, lambda_K). The weights must
// share parity so that m = (t - k)/2 is an integer.
struct WeightParameters {
    int t = 0;
    int k = 0;
    cplx q{0.0, 0.0};
    cplx lambda_K{0.25, 0.0};

    WeightParameters() = default;
    WeightParameters(int t_, int k_, cplx q_, cplx lambda_K_);

    int m() const { return (t - k) / 2; }
};

enum class PChoice { RootQ, RootTK2Q };

enum class Degeneracy { NonDegenerate, DegenerateNonLog, DegenerateLog };

struct DerivedSpectralData {
    int m = 0;
    cplx lambda_eff;           // lambda_K - (t/2)(1 - t/2)
    cplx p;                    // chosen transformation exponent
    cplx a, b, c_hde;          // hypergeometric parameters; Re(a) >= Re(b)
    double alpha_f = 0.0;      // min(Re(p-a), Re(p-b))
    double alpha_K = 0.0;      // -t/2 - Re(q) + alpha_f
    Degeneracy degeneracy = Degeneracy::NonDegenerate;
    PChoice p_choice = PChoice::RootQ;
    WeightParameters params;
};

// c = 1 + (k-t)/2, a+b = 2p - t - 2q + 1, ab = (p-q) c + lambda_eff.
// a is the root with the larger real part (ties by larger imaginary part).
DerivedSpectralData derive(const WeightParameters& params, PChoice choice = PChoice::RootQ);

enum class SingularPoint { Zero, One, Infinity };

// Local exponents: {0, m} at 0, {q, (t+k)/2 + q} at 1, and at infinity the
// roots of r^2 + (t + 2q - 1) r + lambda_eff - q(1 - t - q).
std::pair<cplx, cplx> indicial_exponents(const WeightParameters& params, SingularPoint where);

// Potential term of the radial equation, q (-(1-t-q) z + (1 - t/2 + k/2)) / (1 - z).
cplx potential_cf(double z, const WeightParameters& params);

// Same potential in the x = -4z coordinate: q ((1-t-q) x + 2(2 - t + k)) / (x + 4).
cplx potential_cf_x(double x, const WeightParameters& params);

struct ConvergenceReport {
    double alpha_K = 0.0;
    double growth_C = 0.0;
    bool periodized = false;      // 2 alpha_K < -1
    bool automorphic = false;     // alpha_K < -1
    bool operator_ok = false;     // alpha_K < min(-1, -C)
    bool local_abs_conv = false;  // |t - k| < 4
    bool pv_required = false;     // |t - k| >= 4
};

ConvergenceReport convergence_report(const WeightParameters& params, double input_growth_C,
                                     PChoice choice = PChoice::RootQ);

}  // namespace wsk
