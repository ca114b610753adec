#pragma once

#include <cstdint>
#include <stdexcept>

namespace levynest {

// Every tolerance-dependent verdict in the library is taken against the
// values collected here, so a report that embeds its RunConfig is fully
// reproducible.
struct RunConfig {
    double tol_psd   = 1e-10;  // eigenvalue floor for Gaussian parts
    double tol_unit  = 1e-12;  // |xi| = 1 slack for polar directions
    double tol_cf    = 1e-8;   // cumulant / characteristic-function agreement
    double tol_norm  = 1e-8;   // direction-independence of the polar norm
    double tol_mono  = 1e-10;  // absolute slack for difference-operator signs
    double tol_gamma = 1e-6;   // relative residual for mixture fits

    double quad_target    = 1e-12;  // absolute quadrature target
    int    quad_max_depth = 15;

    int    zgrid_count  = 32;
    double zgrid_radius = 5.0;
    std::uint64_t seed  = 0;

    void validate() const {
        const double tols[] = {tol_psd, tol_unit, tol_cf, tol_norm,
                               tol_mono, tol_gamma, quad_target};
        for (double t : tols)
            if (!(t > 0.0))
                throw std::invalid_argument("RunConfig: tolerances must be positive");
        if (quad_max_depth < 1 || zgrid_count < 1 || !(zgrid_radius > 0.0))
            throw std::invalid_argument("RunConfig: bad grid or depth settings");
    }
};

inline const RunConfig& default_config() {
    static const RunConfig cfg{};
    return cfg;
}

}  // namespace levynest
