#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "levynest/catalog.hpp"
#include "levynest/rng.hpp"
#include "levynest/transform.hpp"
#include "levynest/triplet.hpp"

namespace levynest {

// Monte Carlo side of the transform: draw the weighted integral of a
// finite-activity driver on [0, T] and compare the empirical characteristic
// function of the draws against the cumulant of the transformed triplet.
// Only atomic jump parts are admitted, so the jump side is an exact compound
// Poisson sum; there is no small-jump remainder to argue away. For negative
// index the weight hits zero at -1/alpha and the horizon is exact; above
// zero the horizon truncates a genuine tail, and the module reports a bound
// on what was dropped.

struct SimSpec {
    LevyTriplet law;
    double horizon = 0.0;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
    std::vector<Vec> z_grid;
};

// Comparison results in grid order. deviation is |empirical - analytic|
// measured in units of 1/sqrt(n_paths), so the flag level reads as a sigma
// count; truncation is the dropped-tail bound (zero when the horizon is
// exact) and is filled by run_simulation.
struct SimReport {
    std::vector<Vec> z_grid;
    std::vector<std::complex<double>> empirical;
    std::vector<std::complex<double>> analytic;
    std::vector<double> deviation;
    double flag_sigma = 4.8;
    std::vector<std::size_t> flagged;
    std::size_t n_paths = 0;
    double truncation = 0.0;
};

namespace detail {

inline double integrand_weight(double alpha, double t) {
    if (alpha == 0.0) return std::exp(-t);
    return std::pow(1.0 + alpha * t, -1.0 / alpha);
}

// int_0^T f_alpha(t)^p dt in closed form; the p = 1 case carries the drift
// and compensator, the p = 2 case the Gaussian variance.
inline double weight_moment(double alpha, double p, double T) {
    if (alpha == 0.0) return (1.0 - std::exp(-p * T)) / p;
    if (alpha == p) return std::log1p(alpha * T) / alpha;
    return (std::pow(1.0 + alpha * T, 1.0 - p / alpha) - 1.0) / (alpha - p);
}

// int_T^infinity f_alpha(t)^p dt; infinite once alpha reaches p.
inline double weight_tail(double alpha, double p, double T) {
    if (alpha == 0.0) return std::exp(-p * T) / p;
    if (alpha >= p) return std::numeric_limits<double>::infinity();
    return std::pow(1.0 + alpha * T, 1.0 - p / alpha) / (p - alpha);
}

// |C(w)| <= lin |w| + quad |w|^2, valid for every w. The linear coefficient
// collects the drift and, under the compensated convention, the part of each
// atom its truncated compensator misses; mean-zero laws with zero gamma get
// lin = 0, which is what makes polynomial-tail horizons affordable.
struct CumulantEnvelope {
    double lin = 0.0;
    double quad = 0.0;
};

inline CumulantEnvelope cumulant_envelope(const LevyTriplet& mu) {
    CumulantEnvelope env;
    env.lin = norm(mu.gamma);
    env.quad = 0.5 * lambda_max(mu.A);
    for (const auto& comp : mu.nu.components) {
        const auto& at = std::get<AtomicRadial>(comp.radial);
        for (const auto& a : at.atoms) {
            env.quad += 0.5 * a.m * a.r * a.r;
            if (mu.centering == Centering::Compensated)
                env.lin += a.m * a.r * a.r * a.r / (1.0 + a.r * a.r);
        }
    }
    return env;
}

struct Kahan {
    double sum = 0.0;
    double carry = 0.0;
    void add(double v) {
        const double t = sum + v;
        carry += (std::fabs(sum) >= std::fabs(v)) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + carry; }
};

}  // namespace detail

inline void validate_sim_spec(const SimSpec& spec, double alpha,
                              const RunConfig& cfg = default_config()) {
    validate_triplet(spec.law, cfg);
    for (const auto& comp : spec.law.nu.components)
        if (!std::holds_alternative<AtomicRadial>(comp.radial))
            throw std::invalid_argument(
                "SimSpec: only atomic jump parts are simulated; anything with "
                "infinite activity would need a small-jump cutoff this module "
                "refuses to hide");
    if (spec.n_paths < 1000)
        throw std::invalid_argument("SimSpec: at least 1000 paths are required");
    if (!(spec.horizon > 0.0))
        throw std::invalid_argument("SimSpec: horizon must be positive");
    if (alpha < 0.0 && spec.horizon > -1.0 / alpha + 1e-12)
        throw std::invalid_argument(
            "SimSpec: the weight vanishes at -1/alpha; the horizon cannot pass it");
    if (spec.z_grid.empty())
        throw std::invalid_argument("SimSpec: empty evaluation grid");
    for (const auto& z : spec.z_grid)
        if (z.dim() != spec.law.dim())
            throw std::invalid_argument("SimSpec: grid dimension mismatch");
}

// One draw per path of gamma int f + sqrt(int f^2) A^{1/2} g + sum f(tau) J
// minus the compensator the raw Poisson sum is missing. Each path owns
// stream (seed, path index) of the counter generator, so draws are a pure
// function of the path index: replays are bit-exact whatever the evaluation
// order, and growing n_paths extends the sample without disturbing it.
inline std::vector<Vec> simulate_integral(const SimSpec& spec, double alpha,
                                          const RunConfig& cfg = default_config()) {
    validate_sim_spec(spec, alpha, cfg);
    const std::size_t d = spec.law.dim();
    const double T = spec.horizon;
    const double f1 = detail::weight_moment(alpha, 1.0, T);
    const double gauss_scale = std::sqrt(detail::weight_moment(alpha, 2.0, T));
    const GaussMatrix root = sym_sqrt(spec.law.A, cfg.tol_psd);

    Vec base = f1 * spec.law.gamma;
    struct JumpAtom {
        double cum;
        double r;
        const Vec* xi;
    };
    std::vector<JumpAtom> table;
    double rate = 0.0;
    for (const auto& comp : spec.law.nu.components) {
        double center = 0.0;
        for (const auto& a : std::get<AtomicRadial>(comp.radial).atoms) {
            rate += a.m;
            table.push_back({rate, a.r, &comp.xi});
            center += (spec.law.centering == Centering::Compensated)
                          ? a.m * a.r / (1.0 + a.r * a.r)
                          : a.m * a.r;
        }
        base = base - (f1 * center) * comp.xi;
    }

    std::vector<Vec> out(spec.n_paths, Vec(d));
    std::vector<double> g(d);
    for (std::size_t p = 0; p < spec.n_paths; ++p) {
        CounterRng rng(spec.seed, p);
        Vec x = base;
        for (std::size_t i = 0; i < d; ++i) g[i] = rng.normal();
        for (std::size_t i = 0; i < d; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < d; ++j) s += root(i, j) * g[j];
            x[i] += gauss_scale * s;
        }
        const std::uint64_t jumps = rng.poisson(rate * T);
        for (std::uint64_t k = 0; k < jumps; ++k) {
            const double tau = T * rng.u01();
            const double u = rate * rng.u01();
            const JumpAtom* hit = &table.back();
            for (const auto& a : table)
                if (u <= a.cum) {
                    hit = &a;
                    break;
                }
            const double w = detail::integrand_weight(alpha, tau) * hit->r;
            for (std::size_t i = 0; i < d; ++i) x[i] += w * (*hit->xi)[i];
        }
        out[p] = x;
    }
    return out;
}

inline SimReport compare_cf(const std::vector<Vec>& samples, const TransformResult& analytic,
                            const std::vector<Vec>& z_grid,
                            const RunConfig& cfg = default_config()) {
    if (!analytic.output)
        throw std::invalid_argument("compare_cf: the transform result carries no image law");
    if (samples.empty() || z_grid.empty())
        throw std::invalid_argument("compare_cf: nothing to compare");
    const double n = static_cast<double>(samples.size());
    SimReport rep;
    rep.z_grid = z_grid;
    rep.n_paths = samples.size();
    for (const auto& z : z_grid) {
        // compensated accumulation keeps the reduction insensitive to order
        detail::Kahan re, im;
        for (const auto& x : samples) {
            const double phase = dot(z, x);
            re.add(std::cos(phase));
            im.add(std::sin(phase));
        }
        const std::complex<double> ecf(re.value() / n, im.value() / n);
        const std::complex<double> acf = std::exp(cumulant(*analytic.output, z, cfg));
        rep.empirical.push_back(ecf);
        rep.analytic.push_back(acf);
        rep.deviation.push_back(std::sqrt(n) * std::abs(ecf - acf));
        if (rep.deviation.back() > rep.flag_sigma)
            rep.flagged.push_back(rep.empirical.size() - 1);
    }
    return rep;
}

// Bound on the modulus of the dropped tail int_T^infinity C(f(t) z) dt,
// evaluated at the widest grid point. Finite for quadratic-envelope laws up
// to index 2; a nonzero linear term kills it at index 1 and above, and the
// bound honestly returns infinity there.
inline double truncation_bound(const SimSpec& spec, double alpha,
                               const RunConfig& cfg = default_config()) {
    if (alpha < 0.0)
        throw std::invalid_argument(
            "truncation_bound: below zero the horizon is exact; no tail to bound");
    validate_sim_spec(spec, alpha, cfg);
    const detail::CumulantEnvelope env = detail::cumulant_envelope(spec.law);
    double zmax = 0.0;
    for (const auto& z : spec.z_grid) zmax = std::max(zmax, norm(z));
    const double lin = env.lin == 0.0
                           ? 0.0
                           : env.lin * zmax * detail::weight_tail(alpha, 1.0, spec.horizon);
    return lin + env.quad * zmax * zmax * detail::weight_tail(alpha, 2.0, spec.horizon);
}

// Smallest horizon whose dropped-tail bound sits a decade under the flag
// threshold 4/sqrt(n), so truncation bias cannot masquerade as sampling
// noise. Negative index needs no search: the weight's root is the horizon.
inline double choose_horizon(const LevyTriplet& law, double alpha, std::size_t n_paths,
                             const std::vector<Vec>& z_grid,
                             const RunConfig& cfg = default_config()) {
    if (alpha < 0.0) return -1.0 / alpha;
    const double target = 0.1 * 4.0 / std::sqrt(static_cast<double>(n_paths));
    SimSpec probe{law, 1.0, std::max<std::size_t>(n_paths, 1000), 0, z_grid};
    auto bound = [&](double T) {
        probe.horizon = T;
        return truncation_bound(probe, alpha, cfg);
    };
    double hi = 1.0;
    int doublings = 0;
    while (bound(hi) > target) {
        hi *= 2.0;
        if (++doublings > 200)
            throw std::domain_error(
                "choose_horizon: the tail bound never meets the target; the law "
                "keeps a linear cumulant term the weight cannot integrate at "
                "this alpha");
    }
    if (doublings == 0) return hi;
    double lo = 0.5 * hi;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (bound(mid) > target ? lo : hi) = mid;
    }
    return hi;
}

inline SimReport run_simulation(const SimSpec& spec, double alpha,
                                const RunConfig& cfg = default_config()) {
    const TransformResult image = apply_phi(spec.law, alpha, cfg);
    if (!image.domain_ok || !image.output)
        throw std::domain_error(
            "run_simulation: the law is outside the transform domain at this alpha");
    SimReport rep = compare_cf(simulate_integral(spec, alpha, cfg), image, spec.z_grid, cfg);
    rep.truncation = alpha < 0.0 ? 0.0 : truncation_bound(spec, alpha, cfg);
    return rep;
}

struct DemoSim {
    std::string name;
    double alpha = 0.0;
    SimSpec spec;
};

// Standing examples, one per regime: a diffusion under the exponential
// weight, a pure drift whose integral is a point mass, jumps over a
// diffusion floor, and a centered compound Poisson pushed through a
// fractional index where the horizon grows polynomially.
inline std::vector<DemoSim> demo_sims(std::size_t n_paths, std::uint64_t seed) {
    std::vector<DemoSim> out;
    const std::vector<Vec> grid = make_z_grid(1);
    {
        LevyTriplet law = make_gaussian(1, GaussMatrix::identity(1));
        const double T = choose_horizon(law, 0.0, n_paths, grid);
        out.push_back({"gaussian", 0.0, SimSpec{law, T, n_paths, seed, grid}});
    }
    {
        LevyTriplet law = make_delta(Vec{1.5});
        out.push_back({"drift", -1.0, SimSpec{law, 1.0, n_paths, seed, grid}});
    }
    {
        LevyTriplet law = convolve(make_atomic_cp({{0.5, 1.2}, {2.0, 0.7}}, Vec{1.0}),
                                   make_gaussian(1, GaussMatrix::scalar(1, 0.3)));
        const double T = choose_horizon(law, 0.0, n_paths, grid);
        out.push_back({"jump_diffusion", 0.0, SimSpec{law, T, n_paths, seed, grid}});
    }
    {
        LevyTriplet law = make_atomic_cp({{0.5, 1.2}, {2.0, 0.7}}, Vec{1.0});
        law.centering = Centering::MeanZero;  // rereads gamma = 0 as the mean
        const double T = choose_horizon(law, 0.5, n_paths, grid);
        out.push_back({"centered_jumps", 0.5, SimSpec{law, T, n_paths, seed, grid}});
    }
    return out;
}

}  // namespace levynest
