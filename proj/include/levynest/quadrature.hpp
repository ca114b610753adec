#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "levynest/config.hpp"

namespace levynest {

// Thrown when adaptive refinement bottoms out above the requested target.
// Carries the achieved estimate so callers can report instead of guessing.
struct QuadratureError : std::runtime_error {
    QuadratureError(const std::string& what, double achieved_)
        : std::runtime_error(what + " (achieved error " + std::to_string(achieved_) + ")"),
          achieved(achieved_) {}
    double achieved;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
};

namespace detail {
using gk15 = boost::math::quadrature::gauss_kronrod<double, 15>;
}

template <class F>
QuadResult integrate(F&& f, double a, double b,
                     const RunConfig& cfg = default_config()) {
    if (a == b) return {0.0, 0.0};
    double err = 0.0;
    const double val = detail::gk15::integrate(f, a, b, cfg.quad_max_depth,
                                               cfg.quad_target, &err);
    // err is the summed Kronrod-Gauss discrepancy over leaf panels, a crude
    // upper estimate; on the smooth integrands used here it sits near machine
    // precision, so a large report signals a genuinely unresolved integral.
    if (!std::isfinite(val))
        throw QuadratureError("integrate: non-finite result", err);
    if (err > 1e3 * cfg.quad_target * std::max(1.0, std::fabs(val)))
        throw QuadratureError("integrate: refinement exhausted", err);
    return {val, err};
}

struct ComplexQuadResult {
    std::complex<double> value{0.0, 0.0};
    double error = 0.0;
};

template <class F>
ComplexQuadResult integrate_complex(F&& f, double a, double b,
                                    const RunConfig& cfg = default_config()) {
    const QuadResult re = integrate([&](double x) { return std::real(f(x)); }, a, b, cfg);
    const QuadResult im = integrate([&](double x) { return std::imag(f(x)); }, a, b, cfg);
    return {{re.value, im.value}, re.error + im.error};
}

// Integrates g over (0, upper] when g(r) ~ const * r^{power} near zero with
// power > -1, via u = log r. The lower cut is placed where the integrand's
// own decay guarantees the dropped tail is below the quadrature target.
template <class F>
ComplexQuadResult integrate_log_head(F&& g, double upper, double power,
                                     const RunConfig& cfg = default_config()) {
    if (!(power > -1.0))
        throw std::invalid_argument("integrate_log_head: need power > -1");
    const double decay = power + 1.0;  // exponent of e^{u(power+1)} after substitution
    const double u_hi = std::log(upper);
    const double u_lo = u_hi - 45.0 / decay;
    auto h = [&](double u) {
        const double r = std::exp(u);
        return g(r) * r;  // Jacobian of r = e^u
    };
    return integrate_complex(h, u_lo, u_hi, cfg);
}

}  // namespace levynest
