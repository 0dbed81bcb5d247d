#include "wsk/integral_operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace wsk {

namespace {

constexpr double pi = std::numbers::pi;

// 4-point Gauss-Legendre on [-1, 1], positive half
constexpr double gl_x[2] = {0.3399810435848563, 0.8611363115940526};
constexpr double gl_w[2] = {0.6521451548625461, 0.3478548451374538};

// C4 smoothstep, 0 below the inner radius and 1 beyond the outer one. The
// high smoothness keeps finite differences of the operator in the base
// point well conditioned.
double smooth_chi(double d, double r_in, double r_out) {
    if (d <= r_in) return 0.0;
    if (d >= r_out) return 1.0;
    const double x = (d - r_in) / (r_out - r_in);
    const double x5 = x * x * x * x * x;
    return x5 * (126.0 + x * (-420.0 + x * (540.0 + x * (-315.0 + 70.0 * x))));
}

// point at geodesic distance rho and direction theta from the center,
// through the unit-disk model
HPoint geodesic_point(const HPoint& center, double rho, double theta) {
    const cplx w = std::tanh(0.5 * rho) * std::exp(cplx(0.0, theta));
    const cplx tau = (center.tau_bar() * w - center.tau()) / (w - 1.0);
    return HPoint(tau);
}

}  // namespace

InputForm InputForm::eisenstein_weight0(double s, int Q) {
    if (!(s > 1.0)) throw std::invalid_argument("InputForm: Eisenstein needs s > 1");
    InputForm f;
    f.kind = Kind::EisensteinWeight0;
    f.s = s;
    f.Q = Q;
    f.growth_C = s;
    return f;
}

InputForm InputForm::sampled_grid(std::vector<std::pair<HPoint, cplx>> samples, int weight,
                                  double growth_C) {
    if (samples.empty()) throw std::invalid_argument("InputForm: empty sample table");
    InputForm f;
    f.kind = Kind::SampledGrid;
    f.samples = std::move(samples);
    f.grid_weight = weight;
    f.growth_C = growth_C;
    return f;
}

cplx InputForm::eval(const HPoint& tau) const {
    if (kind == Kind::EisensteinWeight0) return {eisenstein(tau, s, Q).value, 0.0};
    double best = std::numeric_limits<double>::infinity();
    cplx out{0.0, 0.0};
    for (const auto& [p, v] : samples) {
        const double d = hyperbolic_distance(p, tau);
        if (d < best) {
            best = d;
            out = v;
        }
    }
    return out;
}

void QuadratureSpec::validate() const {
    if (!(cusp_height_Y > 2.0)) throw std::invalid_argument("QuadratureSpec: Y too small");
    if (grid_u < 8 || grid_v < 8) throw std::invalid_argument("QuadratureSpec: grid too coarse");
    if (!(pv_rho >= 0.3 && pv_rho <= 0.8))
        throw std::invalid_argument("QuadratureSpec: shell ratio outside [0.3, 0.8]");
    if (pv_shells < 4) throw std::invalid_argument("QuadratureSpec: too few shells");
    if (angular_nodes < 64) throw std::invalid_argument("QuadratureSpec: need >= 64 angles");
}

PVResult pv_local_integral(const std::function<cplx(const HPoint&)>& integrand,
                           const HPoint& center, const QuadratureSpec& spec) {
    spec.validate();
    const double R = spec.pv_R > 0.0 ? spec.pv_R
                                     : std::min(0.25, 0.8 * isolation_radius(center));
    if (R >= isolation_radius(center))
        throw std::domain_error("pv_local_integral: radius reaches into the orbit");

    const int A = spec.angular_nodes;
    const double dtheta = 2.0 * pi / A;

    auto shell_integral = [&](double lo, double hi) {
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        CompensatedSum acc;
        for (int i = 0; i < 2; ++i) {
            for (double sgn : {-1.0, 1.0}) {
                const double rho = mid + sgn * half * gl_x[i];
                const double wr = half * gl_w[i] * std::sinh(rho) * dtheta;
                for (int k = 0; k < A; ++k)
                    acc.add(wr * integrand(geodesic_point(center, rho, dtheta * k)));
            }
        }
        return acc.value();
    };

    CompensatedSum partial;
    std::vector<double> gaps;
    cplx last_shell{0.0, 0.0}, prev_shell{0.0, 0.0};
    double outer = R;
    for (int j = 1; j <= spec.pv_shells; ++j) {
        const double inner = R * std::pow(spec.pv_rho, j);
        prev_shell = last_shell;
        last_shell = shell_integral(inner, outer);
        partial.add(last_shell);
        gaps.push_back(std::abs(last_shell));
        outer = inner;

        const size_t n = gaps.size();
        // convergent profiles shrink by at least the shell ratio; two
        // consecutive near-flat or growing gaps mean the limit is not forming
        const double noise = 1e-14 * std::max(std::abs(partial.value()), 1e-300);
        if (n >= 3 && gaps[n - 1] > 0.9 * gaps[n - 2] && gaps[n - 2] > 0.9 * gaps[n - 3] &&
            gaps[n - 1] > noise)
            throw std::runtime_error(
                "pv_local_integral: shell sums are not settling (divergent singularity or "
                "angular resolution too coarse)");
    }

    PVResult out;
    out.value = partial.value();
    out.cauchy_gap = gaps.back();
    out.shell_gaps = gaps;
    for (int j = 1; j <= spec.pv_shells; ++j) out.shell_radii.push_back(R * std::pow(spec.pv_rho, j));
    // geometric extrapolation of the remaining shells
    if (std::abs(prev_shell) > 0.0) {
        const cplx rc = last_shell / prev_shell;
        if (std::abs(rc) < 0.95) out.value += last_shell * rc / (1.0 - rc);
    }
    return out;
}

OperatorResult apply_operator(const KernelInstance& inst, const InputForm& phi,
                              const HPoint& tau1, const QuadratureSpec& spec,
                              const TruncationPolicy& policy) {
    spec.validate();
    policy.validate();
    if (phi.weight() != inst.params.k)
        throw std::invalid_argument("apply_operator: input weight differs from the kernel");
    const double aK = inst.spectral.alpha_K;
    const double C = phi.growth_C;
    if (!(aK < std::min(-1.0, -C)))
        throw std::domain_error("apply_operator: alpha_K >= min(-1, -C), integral diverges");

    const HPoint tau_s = reduce_to_fundamental_domain(tau1).point;
    const int w_s = effective_stabilizer_order(tau_s);
    const double shift = double(spec.domain_shift);
    // the window anchor: the reduced base point, unless frozen by the caller
    const HPoint anchor = spec.freeze_mask ? HPoint(spec.mask_u, spec.mask_v)
                                           : HPoint(tau_s.u + shift, tau_s.v);
    const double iso = isolation_radius(anchor);
    const double R = spec.pv_R > 0.0 ? spec.pv_R : std::min(0.25, 0.8 * iso);
    if (R >= iso) throw std::domain_error("apply_operator: excision radius reaches the orbit");
    const double R_in = 0.5 * R;
    if (spec.freeze_mask && orbit_distance(anchor, tau_s) > 0.75 * R_in)
        throw std::invalid_argument(
            "apply_operator: frozen window does not cover the singular point");

    OperatorResult out;
    out.sector_weight = w_s;

    auto kernel_times_phi = [&](const HPoint& t2, double& tail_out) {
        const SumValue kv = automorphic_kernel(inst, tau1, t2, policy);
        const cplx pv = phi.eval(t2);
        tail_out = kv.tail * std::abs(pv);
        return kv.value * pv;
    };

    // far part: masked quadrature over the truncated domain, midpoint cells
    // in (u, log v) with the invariant measure weight 1/v
    auto far_quadrature = [&](int nu, int nv, double& tails) {
        CompensatedSum acc;
        tails = 0.0;
        for (int iu = 0; iu < nu; ++iu) {
            const double u = shift - 0.5 + (iu + 0.5) / double(nu);
            const double uloc = u - shift;
            const double vmin = std::sqrt(std::max(1.0 - uloc * uloc, 1e-12));
            const double w0 = std::log(vmin), w1 = std::log(spec.cusp_height_Y);
            const double dw = (w1 - w0) / double(nv);
            for (int iv = 0; iv < nv; ++iv) {
                const double v = std::exp(w0 + (iv + 0.5) * dw);
                const HPoint t2(u, v);
                const double chi = smooth_chi(orbit_distance(t2, anchor), R_in, R);
                if (chi == 0.0) continue;
                double tail = 0.0;
                const cplx val = kernel_times_phi(t2, tail);
                const double weight = (1.0 / double(nu)) * dw / v;
                acc.add(chi * weight * val);
                tails += chi * weight * tail;
            }
        }
        return acc.value();
    };

    double tails_fine = 0.0, tails_coarse = 0.0;
    const cplx far_fine = far_quadrature(spec.grid_u, spec.grid_v, tails_fine);
    const cplx far_coarse = far_quadrature(spec.grid_u / 2, spec.grid_v / 2, tails_coarse);
    out.far_value = far_fine;
    out.quad_err = std::abs(far_fine - far_coarse);
    out.kernel_tail = tails_fine;

    // local disk term around the singular orbit point, weighted 1/w_s; the
    // (1 - chi) window is radial, so the angular cancellation is untouched
    const HPoint pv_center = anchor;
    QuadratureSpec pv_spec = spec;
    pv_spec.pv_R = R;
    auto local_integrand = [&](const HPoint& t2) {
        const double chi = smooth_chi(hyperbolic_distance(t2, pv_center), R_in, R);
        if (chi == 1.0) return cplx{0.0, 0.0};
        double tail = 0.0;
        return (1.0 - chi) * kernel_times_phi(t2, tail);
    };
    const PVResult local = pv_local_integral(local_integrand, pv_center, pv_spec);
    out.local_value = local.value / double(w_s);
    out.pv_gap = local.cauchy_gap / double(w_s);

    // cusp tail from the measured integrand envelope at the top edge
    {
        const int M = 16;
        double g = 0.0;
        for (int j = 0; j < M; ++j) {
            const HPoint t2(shift - 0.5 + (j + 0.5) / double(M), spec.cusp_height_Y);
            double tail = 0.0;
            g += std::abs(kernel_times_phi(t2, tail)) / double(M);
        }
        const double margin = -(aK + C);
        const double kappa = aK + C - 1.0 + std::min(0.1, 0.5 * margin);
        const double G = g / (spec.cusp_height_Y * spec.cusp_height_Y);
        out.cusp_tail = 2.0 * G * spec.cusp_height_Y / (-1.0 - kappa);
    }

    out.value = out.far_value + out.local_value;
    out.error_budget = out.quad_err + out.pv_gap + out.cusp_tail + out.kernel_tail;
    return out;
}

}  // namespace wsk
