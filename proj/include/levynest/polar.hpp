#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "levynest/triplet.hpp"

namespace levynest {

// Sampling lattice for kernel work: radii e^{-u} with u uniform on
// [-polar_u_span, polar_u_span]. Geometric in r, so log-domain difference
// tests use a uniform step.
inline constexpr double polar_u_span = 3.0;
inline constexpr int polar_u_count = 121;

// The measure written as lambda(dxi) r^{-alpha-1} k_xi(r) dr with the
// direction weights summing to one and the (r^2 ^ 1)-mass balanced so it is
// the same seen from every direction.
struct PolarDecomposition {
    std::vector<Vec> directions;
    std::vector<double> lambda;
    std::vector<std::vector<double>> k;  // k[i][j] sampled at radii[j]
    std::vector<double> radii;           // shared, increasing, geometric
    double alpha = 0.0;
    double norm_const = 0.0;
};

namespace detail {

// Exact binomial row (integer additions stay exact well past any order
// used here).
inline std::vector<double> binom_row(int n) {
    std::vector<double> row(static_cast<std::size_t>(n) + 1, 1.0);
    for (int i = 1; i <= n; ++i)
        for (int j = i - 1; j > 0; --j) row[static_cast<std::size_t>(j)] += row[static_cast<std::size_t>(j) - 1];
    return row;
}

// k of a single component rebased to exponent alpha, evaluated pointwise:
// the density r^{-alpha_ref-1} k(r) rewritten as r^{-alpha-1} [r^{alpha -
// alpha_ref} k(r)].
inline double rebased_k(const RadialPart& part, double alpha, double r) {
    if (const auto* kg = std::get_if<KGridRadial>(&part))
        return std::pow(r, alpha - kg->alpha_ref) * kgrid_value(*kg, r);
    const auto& sm = std::get<StableMixRadial>(part);
    double s = 0.0;
    for (const auto& t : sm.terms) s += t.c * std::pow(r, alpha - t.beta);
    return s;
}

}  // namespace detail

// Returns nothing when some component has no radial density (atoms), which
// is exactly the case excluded by the representation theorem.
inline std::optional<PolarDecomposition> extract_polar(const PolarLevyMeasure& nu,
                                                       double alpha,
                                                       double u_span = polar_u_span,
                                                       int u_count = polar_u_count) {
    if (!(alpha < 2.0)) throw std::invalid_argument("extract_polar: alpha must be < 2");
    if (u_count < 2) throw std::invalid_argument("extract_polar: need at least 2 samples");

    PolarDecomposition pd;
    pd.alpha = alpha;
    pd.radii.resize(static_cast<std::size_t>(u_count));
    const double du = 2.0 * u_span / (u_count - 1);
    for (int j = 0; j < u_count; ++j)
        pd.radii[static_cast<std::size_t>(j)] = std::exp(-u_span + du * j);

    std::vector<double> masses;
    for (const auto& comp : nu.components) {
        if (std::holds_alternative<AtomicRadial>(comp.radial)) return std::nullopt;
        const double s = square_min_mass(comp.radial);
        if (s == 0.0) continue;

        std::size_t slot = pd.directions.size();
        for (std::size_t i = 0; i < pd.directions.size(); ++i)
            if (dot(pd.directions[i], comp.xi) >= 1.0 - 1e-12) {
                slot = i;
                break;
            }
        if (slot == pd.directions.size()) {
            pd.directions.push_back(comp.xi);
            pd.k.emplace_back(pd.radii.size(), 0.0);
            masses.push_back(0.0);
        }
        for (std::size_t j = 0; j < pd.radii.size(); ++j)
            pd.k[slot][j] += detail::rebased_k(comp.radial, alpha, pd.radii[j]);
        masses[slot] += s;
    }

    double total = 0.0;
    for (double s : masses) total += s;
    pd.norm_const = total;
    pd.lambda.resize(masses.size());
    for (std::size_t i = 0; i < masses.size(); ++i) {
        pd.lambda[i] = masses[i] / total;
        const double gain = total / masses[i];
        for (double& v : pd.k[i]) v *= gain;
    }
    return pd;
}

// h_xi(u) = k_xi(e^{-u}) on the uniform u-grid; reversing the radii puts u
// in increasing order.
struct HFunction {
    double u0 = 0.0;
    double du = 0.0;
    std::vector<std::vector<double>> h;
};

inline HFunction h_function(const PolarDecomposition& pd) {
    const std::size_t n = pd.radii.size();
    if (n < 2) throw std::invalid_argument("h_function: degenerate grid");
    HFunction out;
    out.u0 = -std::log(pd.radii[n - 1]);
    out.du = std::log(pd.radii[1] / pd.radii[0]);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double step = std::log(pd.radii[j + 1] / pd.radii[j]);
        if (std::fabs(step - out.du) > 1e-9 * out.du)
            throw std::invalid_argument("h_function: radii are not geometric");
    }
    out.h.resize(pd.k.size());
    for (std::size_t i = 0; i < pd.k.size(); ++i) {
        out.h[i].resize(n);
        for (std::size_t j = 0; j < n; ++j) out.h[i][j] = pd.k[i][n - 1 - j];
    }
    return out;
}

// Alternating binomial sum sum_j (-1)^{n-j} C(n,j) f(u + j eps); both u and
// eps must sit on the sample lattice.
inline double difference_op(const std::vector<double>& f, double u0, double du,
                            double u, double eps, int n) {
    if (n < 0) throw std::invalid_argument("difference_op: order must be >= 0");
    const double fi = (u - u0) / du;
    const long i = std::lround(fi);
    if (std::fabs(fi - i) > 1e-9)
        throw std::invalid_argument("difference_op: u is off the lattice");
    const double fs = eps / du;
    const long step = std::lround(fs);
    if (step < 1 || std::fabs(fs - step) > 1e-9)
        throw std::invalid_argument("difference_op: eps must be a positive grid multiple");
    if (i < 0 || i + static_cast<long>(n) * step >= static_cast<long>(f.size()))
        throw std::out_of_range("difference_op: window leaves the sample range");

    const auto row = detail::binom_row(n);
    double sum = 0.0;
    for (int j = 0; j <= n; ++j) {
        const double sign = ((n - j) % 2 == 0) ? 1.0 : -1.0;
        sum += sign * row[static_cast<std::size_t>(j)] * f[static_cast<std::size_t>(i + j * step)];
    }
    return sum;
}

// Certifies the largest m <= max_n with all difference signs nonnegative on
// the lattice, over every start point and every step eps = du 2^j that fits.
// order -1 flags negative samples outright. margin is the most negative
// difference at the first failing level, or the tightest slack seen when
// every level passes.
struct MonotoneResult {
    int order = 0;
    double margin = 0.0;
};

namespace detail {

inline double level_min(const std::vector<double>& h, int n) {
    double worst = std::numeric_limits<double>::infinity();
    const long size = static_cast<long>(h.size());
    const auto row = binom_row(n);
    for (long step = 1; n * step < size; step *= 2) {
        for (long i = 0; i + n * step < size; ++i) {
            double sum = 0.0;
            for (int j = 0; j <= n; ++j) {
                const double sign = ((n - j) % 2 == 0) ? 1.0 : -1.0;
                sum += sign * row[static_cast<std::size_t>(j)] * h[static_cast<std::size_t>(i + j * step)];
            }
            worst = std::min(worst, sum);
        }
    }
    return worst;
}

}  // namespace detail

inline MonotoneResult monotone_profile(const HFunction& hf, int max_n, double tol_mono) {
    if (max_n < 0) throw std::invalid_argument("monotone_order: max_n must be >= 0");
    MonotoneResult out;
    out.order = max_n;
    out.margin = std::numeric_limits<double>::infinity();
    for (const auto& h : hf.h) {
        for (double v : h)
            if (v < -tol_mono) return {-1, v};
        int order = max_n;
        double margin = std::numeric_limits<double>::infinity();
        for (int n = 1; n <= max_n; ++n) {
            const double worst = detail::level_min(h, n);
            if (worst < -tol_mono) {
                order = n - 1;
                margin = worst;
                break;
            }
            margin = std::min(margin, worst);
        }
        if (order < out.order) {
            out.order = order;
            out.margin = margin;
        } else if (order == out.order) {
            out.margin = std::min(out.margin, margin);
        }
    }
    if (hf.h.empty() || out.margin == std::numeric_limits<double>::infinity())
        out.margin = 0.0;
    return out;
}

inline int monotone_order(const HFunction& hf, int max_n, double tol_mono) {
    return monotone_profile(hf, max_n, tol_mono).order;
}

// Worst forward difference over all orders n <= max_n and all admissible
// lattice steps starting at sample j; feeds the per-point diagnostics
// column of the CSV export.
inline double delta_margin_at(const std::vector<double>& h, std::size_t j, int max_n) {
    double worst = std::numeric_limits<double>::infinity();
    const long size = static_cast<long>(h.size()), i = static_cast<long>(j);
    for (int n = 1; n <= max_n; ++n) {
        const auto row = detail::binom_row(n);
        for (long step = 1; i + n * step < size; step *= 2) {
            double sum = 0.0;
            for (int l = 0; l <= n; ++l) {
                const double sign = ((n - l) % 2 == 0) ? 1.0 : -1.0;
                sum += sign * row[static_cast<std::size_t>(l)] * h[static_cast<std::size_t>(i + l * step)];
            }
            worst = std::min(worst, sum);
        }
    }
    return worst == std::numeric_limits<double>::infinity() ? 0.0 : worst;
}

}  // namespace levynest
