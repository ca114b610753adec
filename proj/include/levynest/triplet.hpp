#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "levynest/linalg.hpp"
#include "levynest/radial.hpp"

namespace levynest {

struct PolarComponent {
    Vec xi;
    RadialPart radial;
};

struct PolarLevyMeasure {
    std::vector<PolarComponent> components;

    bool empty() const { return components.empty(); }
};

// The Levy-Khintchine triplet (A, nu, gamma). The centering flag records
// which compensator the gamma belongs to: x/(1+|x|^2) for Compensated, x
// itself for MeanZero. MeanZero is only representable when the big-jump
// part has a first moment; in that form gamma equals the mean of the law.
struct LevyTriplet {
    GaussMatrix A;
    PolarLevyMeasure nu;
    Vec gamma;
    Centering centering = Centering::Compensated;

    std::size_t dim() const { return gamma.dim(); }
};

inline void validate_triplet(const LevyTriplet& mu,
                             const RunConfig& cfg = default_config(),
                             bool require_nonneg = true) {
    if (!mu.gamma.finite())
        throw std::invalid_argument("LevyTriplet: gamma must be finite, d >= 1");
    if (mu.A.dim() != mu.dim())
        throw std::invalid_argument("LevyTriplet: A dimension mismatch");
    if (!is_psd(mu.A, cfg.tol_psd))
        throw std::invalid_argument("LevyTriplet: A not nonnegative definite");
    for (const auto& comp : mu.nu.components) {
        if (comp.xi.dim() != mu.dim())
            throw std::invalid_argument("LevyTriplet: direction dimension mismatch");
        if (std::fabs(norm(comp.xi) - 1.0) > cfg.tol_unit)
            throw std::invalid_argument("LevyTriplet: direction not unit length");
        validate_radial(comp.radial, require_nonneg);
        if (!std::isfinite(square_min_mass(comp.radial)))
            throw std::invalid_argument("LevyTriplet: infinite (r^2 ^ 1)-mass");
        if (mu.centering == Centering::MeanZero &&
            !tail_power_moment(comp.radial, 1.0).finite)
            throw std::invalid_argument(
                "LevyTriplet: mean-zero centering needs a first moment");
    }
}

inline std::complex<double> cumulant(const LevyTriplet& mu, const Vec& z,
                                     const RunConfig& cfg = default_config()) {
    if (!z.finite() || z.dim() != mu.dim())
        throw std::invalid_argument("cumulant: bad argument vector");
    std::complex<double> s(-0.5 * quad_form(mu.A, z), dot(mu.gamma, z));
    for (const auto& comp : mu.nu.components)
        s += radial_cumulant(comp.radial, dot(z, comp.xi), mu.centering, cfg);
    return s;
}

inline std::complex<double> char_fn(const LevyTriplet& mu, const Vec& z,
                                    const RunConfig& cfg = default_config()) {
    return std::exp(cumulant(mu, z, cfg));
}

// Mean of the law; exists iff the big-jump part has a first moment.
inline bool mean_vector(const LevyTriplet& mu, Vec& out,
                        const RunConfig& cfg = default_config()) {
    if (mu.centering == Centering::MeanZero) {
        out = mu.gamma;
        return true;
    }
    out = mu.gamma;
    for (const auto& comp : mu.nu.components) {
        if (!tail_power_moment(comp.radial, 1.0).finite) return false;
        const MaybeMoment gap = compensator_gap(comp.radial, cfg);
        out = out + gap.value * comp.xi;
    }
    return true;
}

inline LevyTriplet to_mean_zero(const LevyTriplet& mu,
                                const RunConfig& cfg = default_config()) {
    if (mu.centering == Centering::MeanZero) return mu;
    LevyTriplet out = mu;
    if (!mean_vector(mu, out.gamma, cfg))
        throw std::domain_error("to_mean_zero: big-jump part has no first moment");
    out.centering = Centering::MeanZero;
    return out;
}

inline LevyTriplet to_compensated(const LevyTriplet& mu,
                                  const RunConfig& cfg = default_config()) {
    if (mu.centering == Centering::Compensated) return mu;
    LevyTriplet out = mu;
    for (const auto& comp : mu.nu.components)
        out.gamma = out.gamma - compensator_gap(comp.radial, cfg).value * comp.xi;
    out.centering = Centering::Compensated;
    return out;
}

inline LevyTriplet convolve(const LevyTriplet& mu1, const LevyTriplet& mu2,
                            const RunConfig& cfg = default_config()) {
    if (mu1.dim() != mu2.dim())
        throw std::invalid_argument("convolve: dimension mismatch");
    LevyTriplet a = mu1, b = mu2;
    if (a.centering != b.centering) {
        a = to_compensated(a, cfg);
        b = to_compensated(b, cfg);
    }
    LevyTriplet out = a;
    out.A = a.A.plus(b.A);
    out.gamma = a.gamma + b.gamma;
    out.nu.components.insert(out.nu.components.end(), b.nu.components.begin(),
                             b.nu.components.end());
    return out;
}

inline LevyTriplet t_convolution(const LevyTriplet& mu, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("t_convolution: t must be positive");
    LevyTriplet out = mu;
    out.A = mu.A.scaled(t);
    out.gamma = t * mu.gamma;
    for (auto& comp : out.nu.components) {
        if (auto* at = std::get_if<AtomicRadial>(&comp.radial)) {
            for (auto& a : at->atoms) a.m *= t;
        } else if (auto* kg = std::get_if<KGridRadial>(&comp.radial)) {
            for (double& v : kg->k_values) v *= t;
        } else {
            for (auto& term : std::get<StableMixRadial>(comp.radial).terms) term.c *= t;
        }
    }
    return out;
}

// Law of a X: A -> a^2 A, radii stretch by a, and under the compensated
// convention gamma picks up the rescale-drift correction of each part.
inline LevyTriplet scale(const LevyTriplet& mu, double a,
                         const RunConfig& cfg = default_config()) {
    if (!(a > 0.0)) throw std::invalid_argument("scale: factor must be positive");
    LevyTriplet out = mu;
    out.A = mu.A.scaled(a * a);
    out.gamma = a * mu.gamma;
    for (auto& comp : out.nu.components) {
        if (mu.centering == Centering::Compensated)
            out.gamma = out.gamma + (a * rescale_drift(comp.radial, a, cfg)) * comp.xi;
        comp.radial = scale_radial(comp.radial, a);
    }
    return out;
}

inline LevyTriplet shift(const LevyTriplet& mu, const Vec& c) {
    if (c.dim() != mu.dim()) throw std::invalid_argument("shift: dimension mismatch");
    LevyTriplet out = mu;
    out.gamma = mu.gamma + c;
    return out;
}

inline double total_levy_mass_proxy(const LevyTriplet& mu) {
    double s = 0.0;
    for (const auto& comp : mu.nu.components) s += std::fabs(square_min_mass(comp.radial));
    return s;
}

}  // namespace levynest
