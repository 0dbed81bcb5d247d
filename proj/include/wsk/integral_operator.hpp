#pragma once

#include <functional>
#include <vector>

#include "wsk/kernel.hpp"

namespace wsk {

// Input automorphic function for the operator: either a weight-0 Eisenstein
// series (the only eigenform available at desk scale) or a sampled table
// used for plumbing tests of nonzero weights.
struct InputForm {
    enum class Kind { EisensteinWeight0, SampledGrid };

    Kind kind = Kind::EisensteinWeight0;
    double s = 1.2;
    int Q = 20;
    std::vector<std::pair<HPoint, cplx>> samples;
    int grid_weight = 0;
    double growth_C = 1.2;

    static InputForm eisenstein_weight0(double s, int Q);
    static InputForm sampled_grid(std::vector<std::pair<HPoint, cplx>> samples, int weight,
                                  double growth_C);

    int weight() const { return kind == Kind::EisensteinWeight0 ? 0 : grid_weight; }
    double laplace_eigenvalue() const { return s * (1.0 - s); }  // Eisenstein only
    cplx eval(const HPoint& tau) const;
};

struct QuadratureSpec {
    double cusp_height_Y = 20.0;
    int grid_u = 40;
    int grid_v = 40;
    double pv_R = 0.0;    // excision radius; <= 0 picks min(0.25, 0.8 R_H)
    double pv_rho = 0.6;  // geometric shell ratio, within [0.3, 0.8]
    int pv_shells = 7;
    int angular_nodes = 64;
    int domain_shift = 0;  // integrate over the translated domain F + shift

    // Anchors the excision window and disk at a fixed point instead of the
    // reduced base point. The value is unchanged for interior points with a
    // locally integrable singularity (|t - k| <= 2), and the frozen geometry
    // makes the transform differentiable in its base point at fixed
    // discretization. The anchor must keep the true singular point inside
    // the inner window.
    bool freeze_mask = false;
    double mask_u = 0.0;
    double mask_v = 1.0;

    void validate() const;
};

struct PVResult {
    cplx value;
    double cauchy_gap = 0.0;          // magnitude of the last shell
    std::vector<double> shell_gaps;   // |shell_j| for every computed shell
    std::vector<double> shell_radii;  // inner radius of each shell
};

// Limit of integrals over shrinking metric annuli around the center, in
// geodesic polar coordinates. The partial-sum sequence is extrapolated
// geometrically; non-decreasing gaps over the last three shells throw.
PVResult pv_local_integral(const std::function<cplx(const HPoint&)>& integrand,
                           const HPoint& center, const QuadratureSpec& spec);

struct OperatorResult {
    cplx value;
    double error_budget = 0.0;
    // budget breakdown
    double quad_err = 0.0;
    double pv_gap = 0.0;
    double cusp_tail = 0.0;
    double kernel_tail = 0.0;
    int sector_weight = 1;  // effective stabilizer order at the singular point
    cplx far_value;
    cplx local_value;
};

// The regularized operator: quotient-domain quadrature away from the
// singular orbit plus the principal-value disk term weighted by the
// stabilizer order. Refuses when alpha_K >= min(-1, -C) or the input weight
// disagrees with the kernel.
OperatorResult apply_operator(const KernelInstance& inst, const InputForm& phi,
                              const HPoint& tau1, const QuadratureSpec& spec,
                              const TruncationPolicy& policy);

}  // namespace wsk
