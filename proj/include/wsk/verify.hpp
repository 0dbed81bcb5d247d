#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "wsk/integral_operator.hpp"

namespace wsk {

// Weight-k Laplacian -v^2 (d_uu + d_vv) + i k v d_u by second-order central
// differences on the 5-point cross stencil.
cplx fd_laplacian(int weight, const std::function<cplx(const HPoint&)>& field,
                  const HPoint& tau, double h);

// Identities on the slice (tau1, tau2) = (iy, i): the invariant coordinate
// satisfies x + 2 = y + 1/y, the reduced operators match their closed radial
// forms on a fixed test polynomial, and the zero-order coefficient built
// from the auxiliary functions equals the potential term.
struct RadialCheck {
    double x = 0.0;
    double coord_residual = 0.0;
    double laplacian_residual = 0.0;    // weight-0 part, FD vs radial formula
    double first_order_residual = 0.0;  // first-order part, FD vs radial formula
    double potential_residual = 0.0;    // |(q - 4 y^2 Q1 Q2) - Cf(x)|
};
RadialCheck radial_check(const WeightParameters& params, double y);

struct DeltaQCheck {
    double expansion_residual = 0.0;   // P^{-1} Dt(P F) vs D_Q F + (t/2)(1-t/2) F
    double constant_residual = 0.0;    // the F == 1, q = 0 closed value
    double invariance_residual = 0.0;  // D_Q of an invariant F at a moved pair
};
DeltaQCheck delta_q_check(const WeightParameters& params, const HPoint& t1, const HPoint& t2,
                          double h);

struct SlopeFit {
    double slope = 0.0;
    double stderr_est = 0.0;
};

// Ordinary least squares on (log-abscissa, log-ordinate) pairs. Throws when
// fewer than 8 samples or the abscissa span is under min_decades decades.
SlopeFit slope_estimator(std::span<const std::pair<double, double>> samples,
                         double min_decades = 2.0);

struct SuiteCase {
    std::string name;
    std::string inputs;  // compact digest of the case inputs
    double measured = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string ref;  // which property backs the case
};

struct SuiteReport {
    std::string suite;
    unsigned long long seed = 0;
    std::vector<SuiteCase> cases;
    int passed = 0;
    int failed = 0;
    long long wall_ms = 0;

    bool all_pass() const { return failed == 0; }
    // timing is opt-in so that identical seeds give byte-identical reports
    nlohmann::ordered_json to_json(bool include_timing = false) const;
};

const std::vector<std::string>& suite_names();

// Named property suites; deterministic given (name, seed). budget scales the
// sampling effort of the statistical suites.
SuiteReport run_suite(const std::string& name, unsigned long long seed, int budget = 1);

}  // namespace wsk
