#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "levynest/config.hpp"
#include "levynest/polar.hpp"

namespace levynest {

// Nonnegative least squares, active-set style: grow a passive set by the
// most violated dual coordinate, solve the free least-squares subproblem by
// Householder QR, and step back along the segment when a coefficient would
// cross zero. Starts from x = 0 and is fully deterministic.
struct NnlsResult {
    std::vector<double> x;
    int iterations = 0;
};

namespace detail {

// Least squares over the chosen columns; returns solution in z (size of
// picks). Plain QR without pivoting: callers keep the passive set small and
// the columns independent.
inline void ls_subproblem(const std::vector<std::vector<double>>& cols,
                          const std::vector<double>& b,
                          const std::vector<std::size_t>& picks,
                          std::vector<double>& z) {
    const std::size_t m = b.size(), p = picks.size();
    std::vector<double> a(m * p);
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t i = 0; i < m; ++i) a[i * p + j] = cols[picks[j]][i];
    std::vector<double> rhs = b;

    for (std::size_t kcol = 0; kcol < p; ++kcol) {
        double norm = 0.0;
        for (std::size_t i = kcol; i < m; ++i) norm = std::hypot(norm, a[i * p + kcol]);
        if (norm == 0.0) throw std::runtime_error("nnls: dependent column in passive set");
        double head = a[kcol * p + kcol];
        const double alpha = head > 0 ? -norm : norm;
        std::vector<double> v(m - kcol);
        v[0] = head - alpha;
        for (std::size_t i = kcol + 1; i < m; ++i) v[i - kcol] = a[i * p + kcol];
        double vv = 0.0;
        for (double t : v) vv += t * t;
        a[kcol * p + kcol] = alpha;
        for (std::size_t i = kcol + 1; i < m; ++i) a[i * p + kcol] = 0.0;
        if (vv == 0.0) continue;
        for (std::size_t j = kcol + 1; j < p; ++j) {
            double s = 0.0;
            for (std::size_t i = kcol; i < m; ++i) s += v[i - kcol] * a[i * p + j];
            s *= 2.0 / vv;
            for (std::size_t i = kcol; i < m; ++i) a[i * p + j] -= s * v[i - kcol];
        }
        double s = 0.0;
        for (std::size_t i = kcol; i < m; ++i) s += v[i - kcol] * rhs[i];
        s *= 2.0 / vv;
        for (std::size_t i = kcol; i < m; ++i) rhs[i] -= s * v[i - kcol];
    }

    z.assign(p, 0.0);
    for (std::size_t j = p; j-- > 0;) {
        double s = rhs[j];
        for (std::size_t l = j + 1; l < p; ++l) s -= a[j * p + l] * z[l];
        z[j] = s / a[j * p + j];
    }
}

}  // namespace detail

inline NnlsResult nnls(const std::vector<std::vector<double>>& cols,
                       const std::vector<double>& b, int max_iter = 0) {
    const std::size_t n = cols.size(), m = b.size();
    for (const auto& c : cols)
        if (c.size() != m) throw std::invalid_argument("nnls: ragged columns");
    if (max_iter <= 0) max_iter = 3 * static_cast<int>(n) + 30;

    // Work with unit columns so the dual-feasibility stop compares like
    // with like; undo the scaling on exit.
    std::vector<std::vector<double>> unit(n);
    std::vector<double> scale(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (double v : cols[j]) s += v * v;
        scale[j] = std::sqrt(s);
        unit[j] = cols[j];
        if (scale[j] > 0.0)
            for (double& v : unit[j]) v /= scale[j];
    }
    double bnorm = 0.0;
    for (double v : b) bnorm += v * v;
    const double w_tol = 1e-12 * std::sqrt(bnorm);

    NnlsResult out;
    out.x.assign(n, 0.0);
    std::vector<bool> passive(n, false);
    std::vector<std::size_t> picks;
    std::vector<double> resid = b, z;

    while (out.iterations < max_iter) {
        ++out.iterations;
        double best = w_tol;
        std::size_t jbest = n;
        for (std::size_t j = 0; j < n; ++j) {
            if (passive[j] || scale[j] == 0.0) continue;
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) s += unit[j][i] * resid[i];
            if (s > best) {
                best = s;
                jbest = j;
            }
        }
        if (jbest == n) break;
        passive[jbest] = true;
        picks.push_back(jbest);

        for (int inner = 0; inner <= static_cast<int>(n); ++inner) {
            detail::ls_subproblem(unit, b, picks, z);
            double zmin = std::numeric_limits<double>::infinity();
            for (double v : z) zmin = std::min(zmin, v);
            if (zmin > 0.0) {
                for (std::size_t j = 0; j < picks.size(); ++j) out.x[picks[j]] = z[j];
                break;
            }
            double step = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < picks.size(); ++j)
                if (z[j] <= 0.0) {
                    const double xj = out.x[picks[j]];
                    step = std::min(step, xj / (xj - z[j]));
                }
            double xmax = 0.0;
            for (std::size_t j = 0; j < picks.size(); ++j) {
                const std::size_t col = picks[j];
                out.x[col] += step * (z[j] - out.x[col]);
                xmax = std::max(xmax, out.x[col]);
            }
            std::vector<std::size_t> kept;
            for (std::size_t col : picks) {
                if (out.x[col] > 1e-12 * xmax)
                    kept.push_back(col);
                else {
                    out.x[col] = 0.0;
                    passive[col] = false;
                }
            }
            picks = kept;
            if (picks.empty()) break;
        }

        resid = b;
        for (std::size_t col : picks)
            for (std::size_t i = 0; i < m; ++i) resid[i] -= out.x[col] * unit[col][i];
    }
    for (std::size_t j = 0; j < n; ++j)
        if (scale[j] > 0.0) out.x[j] /= scale[j];
    return out;
}

// A fitted spectral mixture: e^{alpha u} h(u) ~ sum_j weight_j e^{beta_j u}.
// lambda_beta[j] spreads atom j over the directions (rows sum to one);
// weights of zero never appear, they are dropped with their atoms.
struct GammaAtom {
    double beta = 0.0;
    double weight = 0.0;
};

struct GammaRepresentation {
    std::vector<GammaAtom> atoms;
    std::vector<std::vector<double>> lambda_beta;
    double fit_residual = 0.0;
};

inline std::vector<double> default_beta_grid(double alpha) {
    const double lo = std::max(alpha, 0.02), hi = 1.98;
    std::vector<double> g(97);
    for (int j = 0; j < 97; ++j) g[static_cast<std::size_t>(j)] = lo + (hi - lo) * j / 96.0;
    return g;
}

namespace detail {

// One direction: weighted NNLS on the exponential dictionary, then two
// passes that re-grid around the current support at 12x finer spacing.
// Rows are scaled by the target so the misfit is measured relatively; flat
// stretches of zero target keep a floor weight so spurious atoms there
// still cost something.
struct DirectionFit {
    std::vector<double> betas;
    std::vector<double> g;
    double residual = 0.0;
};

inline DirectionFit fit_direction(const std::vector<double>& y,
                                  const std::vector<double>& u,
                                  const std::vector<double>& base_grid, double base_step) {
    const double beta_lo = base_grid.front(), beta_hi = base_grid.back();
    double ymax = 0.0;
    for (double v : y) ymax = std::max(ymax, v);
    DirectionFit out;
    if (ymax == 0.0) return out;

    const std::size_t m = y.size();
    std::vector<double> wt(m), rhs(m);
    double den = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        wt[i] = 1.0 / std::max(y[i], 1e-6 * ymax);
        rhs[i] = wt[i] * y[i];
        den += rhs[i] * rhs[i];
    }

    auto attempt = [&](std::vector<double> betas) {
        std::vector<std::vector<double>> cols(betas.size(), std::vector<double>(m));
        for (std::size_t j = 0; j < betas.size(); ++j)
            for (std::size_t i = 0; i < m; ++i)
                cols[j][i] = wt[i] * std::exp(betas[j] * u[i]);
        DirectionFit fit;
        fit.g = nnls(cols, rhs).x;
        fit.betas = std::move(betas);
        double num = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double model = 0.0;
            for (std::size_t j = 0; j < fit.betas.size(); ++j)
                if (fit.g[j] > 0.0) model += fit.g[j] * cols[j][i] / wt[i];
            num += wt[i] * wt[i] * (model - y[i]) * (model - y[i]);
        }
        fit.residual = std::sqrt(num / den);
        return fit;
    };

    out = attempt(base_grid);
    for (int round = 1; round <= 2; ++round) {
        const double fine = base_step / std::pow(12.0, round);
        std::vector<double> next;
        for (std::size_t j = 0; j < out.betas.size(); ++j) {
            if (out.g[j] <= 0.0) continue;
            for (int t = -12; t <= 12; ++t) {
                const double beta = out.betas[j] + fine * t;
                if (beta >= beta_lo && beta <= beta_hi) next.push_back(beta);
            }
        }
        if (next.empty()) break;
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end(),
                               [](double a, double b) { return std::fabs(a - b) < 1e-12; }),
                   next.end());
        DirectionFit trial = attempt(std::move(next));
        if (trial.residual < out.residual) out = std::move(trial);
    }
    return out;
}

}  // namespace detail

inline GammaRepresentation fit_gamma(const HFunction& hf, double alpha,
                                     const std::vector<double>& beta_grid,
                                     const std::vector<double>& lambda) {
    if (beta_grid.empty()) throw std::invalid_argument("fit_gamma: empty beta grid");
    if (lambda.size() != hf.h.size())
        throw std::invalid_argument("fit_gamma: weight/direction mismatch");
    for (const auto& h : hf.h)
        for (double v : h)
            if (v < 0.0) throw std::invalid_argument("fit_gamma: negative kernel sample");

    const std::size_t m = hf.h.empty() ? 0 : hf.h[0].size();
    std::vector<double> u(m);
    for (std::size_t i = 0; i < m; ++i) u[i] = hf.u0 + hf.du * static_cast<double>(i);
    const double base_step =
        beta_grid.size() > 1 ? (beta_grid.back() - beta_grid.front()) / (beta_grid.size() - 1.0)
                             : 0.02;

    std::vector<detail::DirectionFit> fits;
    GammaRepresentation rep;
    std::vector<double> support;
    for (std::size_t d = 0; d < hf.h.size(); ++d) {
        std::vector<double> y(m);
        for (std::size_t i = 0; i < m; ++i) y[i] = std::exp(alpha * u[i]) * hf.h[d][i];
        fits.push_back(detail::fit_direction(y, u, beta_grid, base_step));
        rep.fit_residual = std::max(rep.fit_residual, fits.back().residual);
        for (std::size_t j = 0; j < fits.back().betas.size(); ++j)
            if (fits.back().g[j] > 0.0) support.push_back(fits.back().betas[j]);
    }
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end(),
                              [](double a, double b) { return std::fabs(a - b) < 1e-12; }),
                  support.end());

    for (double beta : support) {
        std::vector<double> per_dir(hf.h.size(), 0.0);
        double total = 0.0;
        for (std::size_t d = 0; d < hf.h.size(); ++d) {
            const auto& f = fits[d];
            for (std::size_t j = 0; j < f.betas.size(); ++j)
                if (std::fabs(f.betas[j] - beta) < 1e-12 && f.g[j] > 0.0) {
                    per_dir[d] = lambda[d] * f.g[j];
                    total += per_dir[d];
                }
        }
        if (total <= 0.0) continue;
        for (double& v : per_dir) v /= total;
        rep.atoms.push_back({beta, total});
        rep.lambda_beta.push_back(std::move(per_dir));
    }
    return rep;
}

inline GammaRepresentation fit_gamma(const PolarDecomposition& pd,
                                     const std::vector<double>& beta_grid) {
    return fit_gamma(h_function(pd), pd.alpha, beta_grid, pd.lambda);
}

// Post-fit mass bookkeeping: each direction's fitted mixture should carry
// the decomposition's common (r^2 ^ 1)-mass, atom beta contributing
// coefficient times (1/beta + 1/(2-beta)). Reports the worst relative
// mismatch over directions.
inline double normalization_gap(const GammaRepresentation& rep, const PolarDecomposition& pd) {
    double gap = 0.0;
    for (std::size_t d = 0; d < pd.lambda.size(); ++d) {
        double s = 0.0;
        for (std::size_t j = 0; j < rep.atoms.size(); ++j) {
            const double beta = rep.atoms[j].beta;
            const double gd = rep.atoms[j].weight * rep.lambda_beta[j][d] / pd.lambda[d];
            s += gd * (1.0 / beta + 1.0 / (2.0 - beta));
        }
        gap = std::max(gap, std::fabs(s - pd.norm_const) / std::max(1.0, pd.norm_const));
    }
    return gap;
}

}  // namespace levynest
