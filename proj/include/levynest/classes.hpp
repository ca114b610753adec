#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "levynest/gamma_fit.hpp"
#include "levynest/polar.hpp"
#include "levynest/triplet.hpp"

namespace levynest {

// Every predicate answers with its verdict plus the number the verdict was
// read off from, so borderline calls can be audited downstream.
struct MembershipReport {
    std::string class_tag;
    bool verdict = false;
    double margin = 0.0;
    std::string method;
};

namespace detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace detail

// Finiteness of the m-th log moment, decided on the big-jump part. All
// three radial families have closed forms, and all of them pass: power or
// compact tails always beat logarithms. The margin carries the moment.
inline MembershipReport has_log_moment(const LevyTriplet& mu, int m) {
    if (m < 1) throw std::invalid_argument("has_log_moment: m must be >= 1");
    double total = 0.0;
    for (const auto& comp : mu.nu.components) total += log_moment_tail(comp.radial, m);
    return {"I_log^" + std::to_string(m), true, total, "closed-form tail log moment"};
}

inline MembershipReport has_alpha_moment(const LevyTriplet& mu, double alpha) {
    if (!(alpha > 0.0 && alpha < 2.0))
        throw std::invalid_argument("has_alpha_moment: alpha must be in (0,2)");
    const std::string tag = "I_" + detail::num(alpha);
    double total = 0.0, exponent_margin = std::numeric_limits<double>::infinity();
    bool finite = true;
    for (const auto& comp : mu.nu.components) {
        const MaybeMoment mm = tail_power_moment(comp.radial, alpha, 1.0);
        finite = finite && mm.finite;
        exponent_margin = std::min(exponent_margin, mm.margin);
        if (mm.finite) total += mm.value;
    }
    if (!finite)
        return {tag, false, exponent_margin, "tail power moment diverges"};
    return {tag, true, total, "closed-form tail power moment"};
}

// Numeric route for the tail-decay limit: sample r^alpha * nu(|x|>r) on a
// decade ladder and Aitken-extrapolate the tail of the sequence.
inline double c_alpha_scan_limit(const PolarLevyMeasure& nu, double alpha) {
    double t[5];
    for (int k = 0; k < 5; ++k) {
        const double r = std::pow(10.0, 2 + k);
        double mass = 0.0;
        for (const auto& comp : nu.components) mass += tail_mass(comp.radial, r);
        t[k] = std::pow(r, alpha) * mass;
    }
    const double denom = t[4] - 2.0 * t[3] + t[2];
    if (std::fabs(denom) < 1e-300) return t[4];
    return t[4] - (t[4] - t[3]) * (t[4] - t[3]) / denom;
}

inline MembershipReport in_C_alpha(const LevyTriplet& mu, double alpha) {
    if (!(alpha > 0.0 && alpha < 2.0))
        throw std::invalid_argument("in_C_alpha: alpha must be in (0,2)");
    const std::string tag = "C_" + detail::num(alpha);
    double limit = 0.0;
    for (const auto& comp : mu.nu.components)
        if (const auto* sm = std::get_if<StableMixRadial>(&comp.radial))
            for (const auto& term : sm->terms)
                if (std::fabs(term.beta - alpha) <= 1e-12) limit += term.c / alpha;
    // Atomic and KGrid parts have bounded support, so their tail term is
    // exactly zero for large r.
    return {tag, limit <= 1e-12, limit, "tail limit r^alpha nu(|x|>r)"};
}

// Existence of the principal-value tail drift for mean-zero laws: after
// the finite-mean gate, each radial family yields a convergent integral
// with a closed form, reported as the margin.
inline MembershipReport in_I1_star(const LevyTriplet& mu,
                                   const RunConfig& cfg = default_config()) {
    Vec mean;
    if (!mean_vector(mu, mean, cfg))
        throw std::domain_error("in_I1_star: law has no finite mean");
    if (norm(mean) > 1e-10)
        throw std::domain_error("in_I1_star: law is not mean-zero");

    Vec limit(mu.dim(), 0.0);
    for (const auto& comp : mu.nu.components) {
        double s = 0.0;
        if (const auto* at = std::get_if<AtomicRadial>(&comp.radial)) {
            for (const auto& a : at->atoms)
                if (a.r > 1.0) s += a.m * a.r * std::log(a.r);
        } else if (const auto* kg = std::get_if<KGridRadial>(&comp.radial)) {
            const double a = kg->alpha_ref;
            auto piece = [&](double c, double d, double v) {
                const double c2 = std::max(c, 1.0);
                if (c2 < d && v != 0.0) s += v * log_power_integral(1, -a, c2, d);
            };
            if (kg->grid.front() > 1.0) piece(1.0, kg->grid.front(), kg->k_values.front());
            for (std::size_t i = 0; i + 1 < kg->grid.size(); ++i)
                piece(kg->grid[i], kg->grid[i + 1], kg->k_values[i]);
        } else {
            for (const auto& term : std::get<StableMixRadial>(comp.radial).terms)
                s += term.c / ((term.beta - 1.0) * (term.beta - 1.0));
        }
        limit = limit + s * comp.xi;
    }
    return {"I_1^*", true, norm(limit), "closed-form tail drift limit"};
}

inline MembershipReport class_level(const LevyTriplet& mu, double alpha, int m,
                                    const RunConfig& cfg = default_config()) {
    if (!(alpha < 2.0)) throw std::invalid_argument("class_level: alpha must be < 2");
    if (m < 0) throw std::invalid_argument("class_level: m must be >= 0");
    const std::string tag = "L(" + detail::num(alpha) + ")_" + std::to_string(m);
    const auto pd = extract_polar(mu.nu, alpha);
    if (!pd) return {tag, false, -1.0, "atomic radial part has no density"};
    if (pd->directions.empty()) return {tag, true, 0.0, "no jump part"};
    const auto prof = monotone_profile(h_function(*pd), m + 1, cfg.tol_mono);
    return {tag, prof.order >= m + 1, prof.margin,
            "lattice difference test to order " + std::to_string(m + 1)};
}

inline MembershipReport class_level_high_alpha(const LevyTriplet& mu, double alpha,
                                               const RunConfig& cfg = default_config()) {
    if (!(alpha >= 2.0))
        throw std::invalid_argument("class_level_high_alpha: alpha must be >= 2");
    const std::string tag = "L(" + detail::num(alpha) + ")_0";
    const double jump_mass = total_levy_mass_proxy(mu);
    if (alpha == 2.0)
        return {tag, jump_mass <= cfg.tol_psd, jump_mass, "gaussian iff no jump part"};
    const double margin = std::max(jump_mass, mu.A.max_abs());
    return {tag, margin <= cfg.tol_psd, margin, "degenerate iff no jump and no gaussian part"};
}

inline MembershipReport in_L_infty(const LevyTriplet& mu, double alpha,
                                   const RunConfig& cfg = default_config()) {
    if (!(alpha < 2.0)) throw std::invalid_argument("in_L_infty: alpha must be < 2");
    const std::string tag = "L(" + detail::num(alpha) + ")_inf";
    const auto pd = extract_polar(mu.nu, alpha);
    if (!pd) return {tag, false, 1.0, "atomic radial part has no density"};
    if (pd->directions.empty()) return {tag, true, 0.0, "no jump part"};
    const auto rep = fit_gamma(*pd, default_beta_grid(alpha));
    return {tag, rep.fit_residual <= cfg.tol_gamma, rep.fit_residual,
            "exponential mixture fit residual"};
}

// The residual law of the scaling identity: everything that is left of mu
// after pulling out the b-rescaled piece. Signed kernels are legal here;
// a genuinely negative remainder just flips `valid`.
struct RhoBDecomposition {
    LevyTriplet rho_b;
    bool valid = false;
    double margin = 0.0;
};

namespace detail {

inline RadialPart rho_b_radial(const RadialPart& part, double alpha, double b) {
    const double ba = std::pow(b, alpha);
    if (const auto* at = std::get_if<AtomicRadial>(&part)) {
        std::map<double, double> masses;
        for (const auto& a : at->atoms) {
            masses[a.r] += a.m;
            masses[a.r / b] -= ba * a.m;
        }
        AtomicRadial out;
        for (const auto& [r, m] : masses)
            if (m != 0.0) out.atoms.push_back({r, m});
        return out;
    }
    if (const auto* sm = std::get_if<StableMixRadial>(&part)) {
        StableMixRadial out;
        for (const auto& term : sm->terms) {
            const double c = term.c * (1.0 - std::pow(b, alpha - term.beta));
            if (c != 0.0) out.terms.push_back({term.beta, c});
        }
        return out;
    }
    const auto& kg = std::get<KGridRadial>(part);
    const double shrink = std::pow(b, alpha - kg.alpha_ref);
    std::vector<double> pts;
    for (double g : kg.grid) {
        pts.push_back(g);
        pts.push_back(g / b);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](double x, double y) { return std::fabs(x - y) <= 1e-15 * y; }),
              pts.end());
    KGridRadial out;
    out.alpha_ref = kg.alpha_ref;
    out.grid = pts;
    // Piecewise constants are sampled at interior points: a breakpoint
    // divided and re-multiplied by b can round across the cell edge.
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double mid = std::sqrt(pts[i] * pts[i + 1]);
        out.k_values.push_back(kgrid_value(kg, mid) - shrink * kgrid_value(kg, b * mid));
    }
    return out;
}

inline bool radial_is_zero(const RadialPart& part) {
    if (const auto* at = std::get_if<AtomicRadial>(&part)) return at->atoms.empty();
    if (const auto* sm = std::get_if<StableMixRadial>(&part)) return sm->terms.empty();
    for (double v : std::get<KGridRadial>(part).k_values)
        if (v != 0.0) return false;
    return true;
}

}  // namespace detail

inline RhoBDecomposition decompose_rho_b(const LevyTriplet& mu, double alpha, double b,
                                         const RunConfig& cfg = default_config()) {
    if (!(b > 1.0)) throw std::invalid_argument("decompose_rho_b: b must be > 1");
    RhoBDecomposition out;
    out.rho_b.centering = Centering::Compensated;
    out.rho_b.A = mu.A.scaled(1.0 - std::pow(b, alpha - 2.0));
    out.rho_b.gamma = Vec(mu.dim(), 0.0);

    double worst = 0.0;
    for (const auto& comp : mu.nu.components) {
        RadialPart part = detail::rho_b_radial(comp.radial, alpha, b);
        if (detail::radial_is_zero(part)) continue;
        worst = std::min(worst, min_signed_component_mass(part));
        out.rho_b.nu.components.push_back({comp.xi, std::move(part)});
    }
    out.margin = worst;
    out.valid = worst >= -1e-12 && is_psd(out.rho_b.A, cfg.tol_psd);

    // gamma_b makes the cumulant identity hold exactly at the unit
    // vectors; the quadratic and jump terms already match in law.
    const double ba = std::pow(b, alpha);
    for (std::size_t i = 0; i < mu.dim(); ++i) {
        const Vec z = unit_vector(mu.dim(), i);
        const std::complex<double> want =
            cumulant(mu, z, cfg) - ba * cumulant(mu, (1.0 / b) * z, cfg) -
            cumulant(out.rho_b, z, cfg);
        out.rho_b.gamma[i] = want.imag();
    }
    return out;
}

inline double verify_selfdec_identity(const LevyTriplet& mu, const LevyTriplet& rho_b,
                                      double alpha, double b,
                                      const std::vector<Vec>& z_grid,
                                      const RunConfig& cfg = default_config()) {
    const double ba = std::pow(b, alpha);
    double worst = 0.0;
    for (const auto& z : z_grid) {
        const std::complex<double> err =
            cumulant(mu, z, cfg) - ba * cumulant(mu, (1.0 / b) * z, cfg) -
            cumulant(rho_b, z, cfg);
        worst = std::max(worst, std::abs(err));
    }
    return worst;
}

// Two sides of the residual-moment estimate: the alpha-moment of the
// remainder's big jumps against b^alpha times the donor mass in (1, b].
struct MomentBound {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

inline MomentBound rho_b_moment_bound(const LevyTriplet& mu, double alpha, double b,
                                      const RunConfig& cfg = default_config()) {
    if (!(alpha > 0.0 && alpha < 2.0))
        throw std::invalid_argument("rho_b_moment_bound: alpha must be in (0,2)");
    const RhoBDecomposition dec = decompose_rho_b(mu, alpha, b, cfg);
    MomentBound out;
    bool finite = true;
    for (const auto& comp : dec.rho_b.nu.components) {
        const MaybeMoment mm = tail_power_moment(comp.radial, alpha, 1.0);
        finite = finite && mm.finite;
        if (mm.finite) out.lhs += mm.value;
    }
    if (!finite) out.lhs = std::numeric_limits<double>::infinity();
    for (const auto& comp : mu.nu.components)
        out.rhs += interval_mass(comp.radial, 1.0, b);
    out.rhs *= std::pow(b, alpha);
    out.holds = finite && out.lhs <= out.rhs + 1e-12 * std::max(1.0, out.rhs);
    return out;
}

}  // namespace levynest
