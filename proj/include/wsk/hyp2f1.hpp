#pragma once

#include <memory>

#include "wsk/spectral.hpp"

namespace wsk {

struct HypSeriesSpec {
    cplx a, b, c_hde;
    int max_terms = 4000;
    double tol = 1e-15;
};

struct HypValue {
    cplx value;
    double error = 0.0;  // tail estimate from the ratio test
};

// Gauss series for |x| <= 1/2; for x < -1/2 the argument is mapped through
// x -> x/(x-1) with the matching prefactor, raising max_terms as needed.
// Throws when the series fails to converge or c_hde is a nonpositive
// integer that the series actually reaches.
HypValue gauss_2f1(const HypSeriesSpec& spec, double x);

// The mapped-argument path in isolation (cross-check target; valid x < 0).
HypValue gauss_2f1_pfaff(const HypSeriesSpec& spec, double x);

enum class InfinityBranch { F1, F2 };

struct FValue {
    cplx value;
    cplx derivative;
};

// Frobenius basis at infinity: z^{-a} F(a, a-c+1; a-b+1; 1/z) and the b
// counterpart, with principal powers (z < 0 gives z^{-a} = e^{-a(ln|z|+i pi)}).
// F2 throws in the logarithmic degenerate class. Requires z <= -2.
cplx basis_at_infinity(const DerivedSpectralData& sd, double z, InfinityBranch branch);
FValue basis_at_infinity_deriv(const DerivedSpectralData& sd, double z, InfinityBranch branch);

// Residual of z(1-z) w'' + [c - (a+b+1) z] w' - a b w.
cplx hde_residual(const DerivedSpectralData& sd, double z, cplx w, cplx wp, cplx wpp);

// The decaying solution at z -> -infinity, normalized so the leading
// z^{p-a} coefficient is 1: f(z) = (1-z)^p F1(z) for z <= anchor_z, and the
// continuation of that data by the radial equation for anchor_z < z < 0.
class SubdominantSolution {
public:
    SubdominantSolution() = default;
    explicit SubdominantSolution(const DerivedSpectralData& sd, double anchor_z = -8.0,
                                 double ode_tol = 1e-10);

    const DerivedSpectralData& spectral() const { return spectral_; }
    double anchor_z() const { return anchor_z_; }
    double ode_tol() const { return ode_tol_; }

    // Direct path: series for z <= anchor, fresh integration otherwise.
    FValue eval(double z) const;

    // Table path: same contract, answers from a dense Hermite table built on
    // first use (thread-safe, behaves as the direct path up to ~1e-9).
    FValue eval_cached(double z) const;

    // f'' from the radial equation at (z, f, f').
    cplx second_derivative(double z, cplx f, cplx fp) const;

private:
    struct Cache;
    DerivedSpectralData spectral_;
    double anchor_z_ = -8.0;
    double ode_tol_ = 1e-10;
    std::shared_ptr<Cache> cache_;
};

FValue f_subdominant(const SubdominantSolution& sol, double z);

}  // namespace wsk
