#pragma once

#include <complex>
#include <vector>

namespace wsk {

using cplx = std::complex<double>;

// Point tau = u + i v of the upper half-plane. v > 0 is enforced at
// construction; every kernel in this library lives on pairs of these.
struct HPoint {
    double u = 0.0;
    double v = 1.0;

    HPoint() = default;
    HPoint(double u_, double v_);
    explicit HPoint(cplx tau);

    cplx tau() const { return {u, v}; }
    cplx tau_bar() const { return {u, -v}; }
};

// Integer matrix (a b; c d) with a d - b c = 1, acting by Moebius maps.
struct ModularMatrix {
    long long a = 1, b = 0, c = 0, d = 1;

    ModularMatrix() = default;
    ModularMatrix(long long a_, long long b_, long long c_, long long d_);

    static ModularMatrix identity() { return {}; }
    static ModularMatrix translation(long long n) { return {1, n, 0, 1}; }
    static ModularMatrix inversion() { return {0, -1, 1, 0}; }

    ModularMatrix inverse() const { return {d, -b, -c, a}; }
    bool operator==(const ModularMatrix&) const = default;
};

ModularMatrix operator*(const ModularMatrix& g, const ModularMatrix& h);

// (a tau + b) / (c tau + d); the image height is v / |c tau + d|^2.
HPoint mobius_apply(const ModularMatrix& g, const HPoint& tau);

// Unit-modulus cocycle ((c tau + d)/|c tau + d|)^k.
cplx automorphy_factor(int k, const ModularMatrix& g, const HPoint& tau);

// Hyperbolic distance, computed as 2 asinh(|t1 - t2| / (2 sqrt(v1 v2)))
// so that small separations keep full precision.
double hyperbolic_distance(const HPoint& t1, const HPoint& t2);

struct ReducedPoint {
    HPoint point;       // representative in the closed standard domain
    ModularMatrix map;  // point == map * input
};

// Alternate unit translations and inversions until |Re| <= 1/2, |tau| >= 1.
// Throws std::runtime_error if the iteration cap is hit (input numerically
// degenerate near the real axis).
ReducedPoint reduce_to_fundamental_domain(const HPoint& tau);

// Half the least displacement d(g tau, tau) over group elements that move
// tau, searched over matrices with bounded entries. entry_bound <= 0 selects
// the default bound max(10, ceil(4 (1 + |u| + 1/v))).
double isolation_radius(const HPoint& tau, int entry_bound = 0);

// 1 at a regular point, 2 on the orbit of i, 3 on the orbit of exp(i pi/3),
// classified by reducing and comparing within a 1e-9 distance tolerance.
int effective_stabilizer_order(const HPoint& tau);

// One representative per coset of the translations inside the full group,
// indexed by coprime bottom rows (c, d) with c > 0, |c| <= Q, |d| <= Q,
// plus the identity coset (0, 1). Lexicographic in (c, d).
std::vector<ModularMatrix> coset_representatives(int Q);

// Distance between the orbits of two points: both are reduced, then the
// minimum of d(g x, y) is taken over a fixed small-entry matrix list.
double orbit_distance(const HPoint& t1, const HPoint& t2);

bool gamma_equivalent(const HPoint& t1, const HPoint& t2, double tol = 1e-9);

// Matrices with |entries| <= bound and det 1, one per +/- pair.
const std::vector<ModularMatrix>& small_matrices(int bound);

}  // namespace wsk
