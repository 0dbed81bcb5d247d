#pragma once

#include "wsk/hyp2f1.hpp"

namespace wsk {

// Compensated (Kahan) accumulation, applied separately to both components.
// Every sum in this library runs in a fixed order with this accumulator so
// reports are bit-stable across runs.
struct CompensatedSum {
    double re = 0.0, im = 0.0;
    double cre = 0.0, cim = 0.0;

    void add(cplx x) {
        const double yr = x.real() - cre;
        const double tr = re + yr;
        cre = (tr - re) - yr;
        re = tr;
        const double yi = x.imag() - cim;
        const double ti = im + yi;
        cim = (ti - im) - yi;
        im = ti;
    }
    cplx value() const { return {re, im}; }
};

struct TruncationPolicy {
    int period_N = 200;    // |n| <= N in the periodized sum
    int coset_Q = 40;      // |c|, |d| <= Q in the coset sum
    double tail_tol = 1e-8;
    int quad_points = 64;

    void validate() const;
};

struct KernelInstance {
    WeightParameters params;
    DerivedSpectralData spectral;
    SubdominantSolution solution;

    static KernelInstance create(const WeightParameters& params, PChoice choice = PChoice::RootQ,
                                 double anchor_z = -8.0, double ode_tol = 1e-10);
};

// z = -|t1 - t2|^2 / (4 v1 v2) = -sinh^2(d/2), nonpositive.
double invariant_z(const HPoint& t1, const HPoint& t2);

// Seed kernel P * f(z). The direct form re-integrates f when needed; the
// fast form reads the solution's dense table (used inside the big sums).
cplx seed_k(const KernelInstance& inst, const HPoint& t1, const HPoint& t2);
cplx seed_k_fast(const KernelInstance& inst, const HPoint& t1, const HPoint& t2);

struct SumValue {
    cplx value;
    double tail = 0.0;  // envelope-based bound on the omitted terms
};

// Sum of K(t1, t2 + n) over n = -N..N in ascending order. Refuses unless
// 2 alpha_K < -1; refuses integer translates of the diagonal.
SumValue periodized_k0(const KernelInstance& inst, const HPoint& t1, const HPoint& t2,
                       const TruncationPolicy& policy);

// Coset sum of K0(t1, g t2) j_k(g, t2), lexicographic in the bottom rows.
// Refuses unless alpha_K < -1; refuses orbit-equivalent argument pairs.
SumValue automorphic_kernel(const KernelInstance& inst, const HPoint& t1, const HPoint& t2,
                            const TruncationPolicy& policy);

enum class FourierMode { Wrapped, Unfolded };

// n-th coefficient of K0(t1, . + i v2) in the first variable's period:
// either the wrapped trapezoid over one period or the unfolded real-line
// integral of the seed kernel.
cplx fourier_coefficient(const KernelInstance& inst, const HPoint& t1, double v2, int n,
                         const TruncationPolicy& policy, FourierMode mode = FourierMode::Wrapped);

struct EisensteinValue {
    double value;
    double tail;
};

// Sum of Im(g tau)^s over the coset representatives; requires s > 1.
EisensteinValue eisenstein(const HPoint& tau, double s, int Q);

struct SingularityFit {
    double order_estimate = 0.0;  // log-log slope of |K| along the ray
    bool log_flag = false;        // |K| tracks log(1/r) with a flat power slope
    double r_min = 0.0, r_max = 0.0;
};

// Samples seed_k along t2 = t1 + r e^{i direction} over r in [1e-4, 1e-2]
// (the lower end is raised when the invariant-variable floor requires it).
SingularityFit singularity_fit(const KernelInstance& inst, const HPoint& t1, double direction);

}  // namespace wsk
