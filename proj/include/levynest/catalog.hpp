#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "levynest/triplet.hpp"

namespace levynest {

// Named example distributions used by the test suite and the CLI. The set
// is deliberately small but hits every radial variant, both dimensions we
// ship, and members on both sides of each classification boundary.

inline LevyTriplet make_gaussian(std::size_t d, const GaussMatrix& A) {
    LevyTriplet mu;
    mu.A = A;
    mu.gamma = Vec(d, 0.0);
    return mu;
}

inline LevyTriplet make_delta(const Vec& gamma) {
    LevyTriplet mu;
    mu.A = GaussMatrix(gamma.dim());
    mu.gamma = gamma;
    return mu;
}

inline LevyTriplet make_stable(double beta, const std::vector<Vec>& directions,
                               const std::vector<double>& weights) {
    if (directions.size() != weights.size() || directions.empty())
        throw std::invalid_argument("make_stable: directions/weights mismatch");
    LevyTriplet mu;
    const std::size_t d = directions.front().dim();
    mu.A = GaussMatrix(d);
    mu.gamma = Vec(d, 0.0);
    for (std::size_t i = 0; i < directions.size(); ++i) {
        StableMixRadial sm;
        sm.terms = {{beta, weights[i]}};
        mu.nu.components.push_back({directions[i], sm});
    }
    return mu;
}

inline LevyTriplet make_stable_mix(const std::vector<StableMixRadial::Term>& atoms,
                                   const Vec& xi) {
    LevyTriplet mu;
    mu.A = GaussMatrix(xi.dim());
    mu.gamma = Vec(xi.dim(), 0.0);
    StableMixRadial sm;
    sm.terms = atoms;
    mu.nu.components.push_back({xi, sm});
    return mu;
}

inline LevyTriplet make_atomic_cp(const std::vector<AtomicRadial::Atom>& atoms,
                                  const Vec& xi) {
    LevyTriplet mu;
    mu.A = GaussMatrix(xi.dim());
    mu.gamma = Vec(xi.dim(), 0.0);
    AtomicRadial at;
    at.atoms = atoms;
    mu.nu.components.push_back({xi, at});
    return mu;
}

// k(r) = m a^alpha on (0, a), zero beyond: the elementary one-step kernel.
inline LevyTriplet make_step_k(double alpha, double a, double m, const Vec& xi) {
    LevyTriplet mu;
    mu.A = GaussMatrix(xi.dim());
    mu.gamma = Vec(xi.dim(), 0.0);
    KGridRadial kg;
    kg.alpha_ref = alpha;
    kg.grid = {0.5 * a, a};
    kg.k_values = {m * std::pow(a, alpha)};
    mu.nu.components.push_back({xi, kg});
    return mu;
}

inline KGridRadial sample_kgrid() {
    KGridRadial kg;
    kg.alpha_ref = 0.5;
    kg.grid = {0.25, 0.5, 1.0, 2.0, 4.0};
    kg.k_values = {1.0, 0.8, 0.5, 0.2};
    return kg;
}

struct CatalogEntry {
    std::string name;
    std::string summary;
    LevyTriplet triplet;
};

inline std::vector<CatalogEntry> catalog() {
    std::vector<CatalogEntry> out;

    out.push_back({"gaussian1", "standard normal on the line",
                   make_gaussian(1, GaussMatrix::identity(1))});
    out.push_back({"gaussian2", "correlated normal in the plane",
                   make_gaussian(2, GaussMatrix::from_rows({{0.5, 0.2}, {0.2, 0.8}}))});
    out.push_back({"delta", "point mass at 1.5", make_delta(Vec{1.5})});
    out.push_back({"stable05", "one-sided stable, exponent 0.5",
                   make_stable(0.5, {Vec{1.0}}, {1.0})});
    out.push_back({"stable15", "symmetric stable, exponent 1.5, unit total weight",
                   make_stable(1.5, {Vec{1.0}, Vec{-1.0}}, {0.5, 0.5})});
    out.push_back({"stable15_d2", "planar stable, exponent 1.5, two directions",
                   make_stable(1.5, {Vec{1.0, 0.0}, Vec{0.6, 0.8}}, {0.7, 0.3})});
    out.push_back({"stablemix", "two-exponent power mix 0.8 and 1.5",
                   make_stable_mix({{0.8, 0.4}, {1.5, 0.6}}, Vec{1.0})});
    out.push_back({"atomic_cp", "compound Poisson with two jump sizes",
                   make_atomic_cp({{0.5, 1.2}, {2.0, 0.7}}, Vec{1.0})});
    out.push_back({"stepk", "one-step kernel at exponent 0.5",
                   make_step_k(0.5, 1.3, 2.0, Vec{1.0})});

    LevyTriplet kg;
    kg.A = GaussMatrix(1);
    kg.gamma = Vec{0.0};
    kg.nu.components.push_back({Vec{1.0}, sample_kgrid()});
    out.push_back({"kgrid", "piecewise kernel on a geometric grid", std::move(kg)});

    LevyTriplet mixed;
    mixed.A = GaussMatrix::scalar(2, 0.1);
    mixed.gamma = Vec{0.0, 0.2};
    mixed.nu.components.push_back({Vec{1.0, 0.0}, sample_kgrid()});
    StableMixRadial sm;
    sm.terms = {{1.2, 0.5}};
    mixed.nu.components.push_back({Vec{0.6, 0.8}, sm});
    out.push_back({"mixed2", "planar mix of grid kernel and power tail",
                   std::move(mixed)});

    return out;
}

inline const LevyTriplet& catalog_lookup(const std::vector<CatalogEntry>& entries,
                                         const std::string& name) {
    for (const auto& e : entries)
        if (e.name == name) return e.triplet;
    throw std::invalid_argument("catalog: no fixture named '" + name + "'");
}

}  // namespace levynest
