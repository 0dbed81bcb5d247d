#include "wsk/halfplane.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace wsk {

HPoint::HPoint(double u_, double v_) : u(u_), v(v_) {
    if (!(v > 0.0)) throw std::invalid_argument("HPoint: need Im(tau) > 0");
}

HPoint::HPoint(cplx tau) : HPoint(tau.real(), tau.imag()) {}

ModularMatrix::ModularMatrix(long long a_, long long b_, long long c_, long long d_)
    : a(a_), b(b_), c(c_), d(d_) {
    if (a * d - b * c != 1) throw std::invalid_argument("ModularMatrix: det != 1");
}

ModularMatrix operator*(const ModularMatrix& g, const ModularMatrix& h) {
    return {g.a * h.a + g.b * h.c, g.a * h.b + g.b * h.d,
            g.c * h.a + g.d * h.c, g.c * h.b + g.d * h.d};
}

HPoint mobius_apply(const ModularMatrix& g, const HPoint& tau) {
    const cplx t = tau.tau();
    const cplx den = double(g.c) * t + double(g.d);
    const cplx num = double(g.a) * t + double(g.b);
    const cplx w = num / den;
    // the exact image height; shields v > 0 from rounding
    return {w.real(), tau.v / std::norm(den)};
}

cplx automorphy_factor(int k, const ModularMatrix& g, const HPoint& tau) {
    const cplx den = double(g.c) * tau.tau() + double(g.d);
    const cplx base = den / std::abs(den);
    return std::pow(base, k);
}

double hyperbolic_distance(const HPoint& t1, const HPoint& t2) {
    const double du = t1.u - t2.u, dv = t1.v - t2.v;
    const double sep = std::sqrt(du * du + dv * dv);
    return 2.0 * std::asinh(sep / (2.0 * std::sqrt(t1.v * t2.v)));
}

ReducedPoint reduce_to_fundamental_domain(const HPoint& tau) {
    double u = tau.u, v = tau.v;
    ModularMatrix acc = ModularMatrix::identity();
    for (int iter = 0; iter < 400; ++iter) {
        const long long n = std::llround(u);
        if (n != 0) {
            u -= double(n);
            acc = ModularMatrix::translation(-n) * acc;
        }
        const double r2 = u * u + v * v;
        if (r2 < 1.0 - 1e-15) {
            // tau -> -1/tau
            const double nu = -u / r2, nv = v / r2;
            u = nu;
            v = nv;
            acc = ModularMatrix::inversion() * acc;
        } else {
            return {HPoint(u, v), acc};
        }
    }
    throw std::runtime_error("reduce_to_fundamental_domain: iteration cap hit");
}

namespace {

long long ext_gcd(long long a, long long b, long long& x, long long& y) {
    if (b == 0) {
        x = (a >= 0) ? 1 : -1;
        y = 0;
        return std::abs(a);
    }
    long long x1, y1;
    const long long g = ext_gcd(b, a % b, x1, y1);
    x = y1;
    y = x1 - (a / b) * y1;
    return g;
}

// Completes a coprime bottom row (c, d) to a determinant-1 matrix.
ModularMatrix complete_bottom_row(long long c, long long d) {
    long long x, y;
    ext_gcd(c, d, x, y);  // x c + y d = 1
    return {y, -x, c, d};
}

}  // namespace

double isolation_radius(const HPoint& tau, int entry_bound) {
    const int B = entry_bound > 0
                      ? entry_bound
                      : std::max(10, int(std::ceil(4.0 * (1.0 + std::abs(tau.u) + 1.0 / tau.v))));
    double best = std::numeric_limits<double>::infinity();
    auto consider = [&](const HPoint& image) {
        const double d = hyperbolic_distance(image, tau);
        if (d > 1e-12 && d < best) best = d;
    };
    // translations
    consider(HPoint(tau.u + 1.0, tau.v));
    consider(HPoint(tau.u - 1.0, tau.v));
    for (long long c = 1; c <= B; ++c) {
        for (long long d = -B; d <= B; ++d) {
            if (std::gcd(c, std::abs(d)) != 1) continue;
            const ModularMatrix base = complete_bottom_row(c, d);
            const HPoint w = mobius_apply(base, tau);
            // the (a, b) family shifts the image by integers
            const long long n0 = std::llround(tau.u - w.u);
            for (long long n = n0 - 2; n <= n0 + 2; ++n)
                consider(HPoint(w.u + double(n), w.v));
        }
    }
    return best / 2.0;
}

int effective_stabilizer_order(const HPoint& tau) {
    const HPoint rep = reduce_to_fundamental_domain(tau).point;
    const double tol = 1e-9;
    const double rho_v = std::sqrt(3.0) / 2.0;
    if (hyperbolic_distance(rep, HPoint(0.0, 1.0)) < tol) return 2;
    if (hyperbolic_distance(rep, HPoint(0.5, rho_v)) < tol ||
        hyperbolic_distance(rep, HPoint(-0.5, rho_v)) < tol)
        return 3;
    return 1;
}

std::vector<ModularMatrix> coset_representatives(int Q) {
    if (Q < 1) throw std::invalid_argument("coset_representatives: Q >= 1");
    std::vector<ModularMatrix> reps;
    reps.push_back(ModularMatrix::identity());  // bottom row (0, 1)
    for (long long c = 1; c <= Q; ++c)
        for (long long d = -Q; d <= Q; ++d) {
            if (std::gcd(c, std::abs(d)) != 1) continue;
            reps.push_back(complete_bottom_row(c, d));
        }
    return reps;
}

const std::vector<ModularMatrix>& small_matrices(int bound) {
    static const std::vector<ModularMatrix> two = [] {
        std::vector<ModularMatrix> out;
        const int B = 2;
        for (long long a = -B; a <= B; ++a)
            for (long long b = -B; b <= B; ++b)
                for (long long c = -B; c <= B; ++c)
                    for (long long d = -B; d <= B; ++d) {
                        if (a * d - b * c != 1) continue;
                        // keep one of each +/- pair (same Moebius action)
                        if (c < 0 || (c == 0 && d < 0)) continue;
                        out.emplace_back(a, b, c, d);
                    }
        return out;
    }();
    if (bound != 2) throw std::invalid_argument("small_matrices: only bound 2 is built");
    return two;
}

double orbit_distance(const HPoint& t1, const HPoint& t2) {
    const HPoint r1 = reduce_to_fundamental_domain(t1).point;
    const HPoint r2 = reduce_to_fundamental_domain(t2).point;
    double best = hyperbolic_distance(r1, r2);
    for (const ModularMatrix& g : small_matrices(2)) {
        const double d = hyperbolic_distance(mobius_apply(g, r1), r2);
        if (d < best) best = d;
    }
    return best;
}

bool gamma_equivalent(const HPoint& t1, const HPoint& t2, double tol) {
    return orbit_distance(t1, t2) < tol;
}

}  // namespace wsk
