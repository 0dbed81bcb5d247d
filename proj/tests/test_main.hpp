#pragma once

#include <random>

#include "doctest.h"
#include "wsk/halfplane.hpp"

namespace wsk_test {

// Uniform doubles from raw engine bits; the standard distributions are not
// bit-reproducible across library implementations.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    double uniform(double lo, double hi) {
        const double x = double(eng_() >> 11) * 0x1p-53;
        return lo + (hi - lo) * x;
    }
    int uniform_int(int lo, int hi) {  // inclusive
        return lo + int(eng_() % uint64_t(hi - lo + 1));
    }
    wsk::cplx uniform_cplx(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi)}; }
    wsk::HPoint point(double umax = 2.0, double vlo = 0.3, double vhi = 3.0) {
        return {uniform(-umax, umax), uniform(vlo, vhi)};
    }
    wsk::ModularMatrix matrix(int steps = 6) {
        wsk::ModularMatrix g;
        for (int i = 0; i < steps; ++i) {
            if (eng_() & 1)
                g = g * wsk::ModularMatrix::translation(uniform_int(-2, 2));
            else
                g = g * wsk::ModularMatrix::inversion();
        }
        return g;
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace wsk_test
