#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <utility>
#include <vector>

#include "levynest/config.hpp"
#include "levynest/rng.hpp"

namespace levynest {

struct Vec {
    std::vector<double> c;

    Vec() = default;
    explicit Vec(std::size_t d, double fill = 0.0) : c(d, fill) {}
    Vec(std::initializer_list<double> xs) : c(xs) {}
    explicit Vec(std::vector<double> xs) : c(std::move(xs)) {}

    std::size_t dim() const { return c.size(); }
    double  operator[](std::size_t i) const { return c[i]; }
    double& operator[](std::size_t i) { return c[i]; }

    bool finite() const {
        for (double v : c)
            if (!std::isfinite(v)) return false;
        return !c.empty();
    }
};

inline Vec operator+(const Vec& a, const Vec& b) {
    Vec r(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vec operator-(const Vec& a, const Vec& b) {
    Vec r(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vec operator*(double s, const Vec& a) {
    Vec r(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) r[i] = s * a[i];
    return r;
}

inline double dot(const Vec& a, const Vec& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec unit_vector(std::size_t d, std::size_t k) {
    Vec e(d);
    e[k] = 1.0;
    return e;
}

// Symmetric d x d matrix for the Gaussian part. Stored dense row-major;
// symmetry is enforced at construction and by set().
class GaussMatrix {
public:
    GaussMatrix() = default;
    explicit GaussMatrix(std::size_t d) : d_(d), a_(d * d, 0.0) {}

    static GaussMatrix identity(std::size_t d) {
        GaussMatrix m(d);
        for (std::size_t i = 0; i < d; ++i) m.a_[i * d + i] = 1.0;
        return m;
    }

    static GaussMatrix scalar(std::size_t d, double v) {
        GaussMatrix m(d);
        for (std::size_t i = 0; i < d; ++i) m.a_[i * d + i] = v;
        return m;
    }

    static GaussMatrix from_rows(const std::vector<std::vector<double>>& rows) {
        const std::size_t d = rows.size();
        GaussMatrix m(d);
        for (std::size_t i = 0; i < d; ++i) {
            if (rows[i].size() != d)
                throw std::invalid_argument("GaussMatrix: ragged rows");
            for (std::size_t j = 0; j < d; ++j) m.a_[i * d + j] = rows[i][j];
        }
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j)
                if (std::fabs(m(i, j) - m(j, i)) > 1e-14 * (1.0 + std::fabs(m(i, j))))
                    throw std::invalid_argument("GaussMatrix: not symmetric");
        return m;
    }

    std::size_t dim() const { return d_; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * d_ + j]; }

    void set(std::size_t i, std::size_t j, double v) {
        a_[i * d_ + j] = v;
        a_[j * d_ + i] = v;
    }

    bool zero(double tol = 0.0) const {
        for (double v : a_)
            if (std::fabs(v) > tol) return false;
        return true;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : a_) m = std::max(m, std::fabs(v));
        return m;
    }

    GaussMatrix scaled(double s) const {
        GaussMatrix m(*this);
        for (double& v : m.a_) v *= s;
        return m;
    }

    GaussMatrix plus(const GaussMatrix& o) const {
        if (o.d_ != d_) throw std::invalid_argument("GaussMatrix: dimension mismatch");
        GaussMatrix m(*this);
        for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] += o.a_[i];
        return m;
    }

private:
    std::size_t d_ = 0;
    std::vector<double> a_;
};

inline double quad_form(const GaussMatrix& A, const Vec& z) {
    if (A.dim() != z.dim()) throw std::invalid_argument("quad_form: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < z.dim(); ++i)
        for (std::size_t j = 0; j < z.dim(); ++j)
            s += z[i] * A(i, j) * z[j];
    return s;
}

struct EigenSystem {
    std::vector<double> values;               // ascending
    std::vector<std::vector<double>> vectors; // vectors[k] belongs to values[k]
};

// Cyclic Jacobi rotations; entirely adequate at the dimensions we run (d <= 4).
inline EigenSystem sym_eigen(const GaussMatrix& A) {
    const std::size_t d = A.dim();
    std::vector<std::vector<double>> m(d, std::vector<double>(d));
    std::vector<std::vector<double>> v(d, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < d; ++i) {
        v[i][i] = 1.0;
        for (std::size_t j = 0; j < d; ++j) m[i][j] = A(i, j);
    }
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j) off += m[i][j] * m[i][j];
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < d; ++p)
            for (std::size_t q = p + 1; q < d; ++q) {
                if (std::fabs(m[p][q]) < 1e-300) continue;
                const double theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (std::size_t k = 0; k < d; ++k) {
                    const double mkp = m[k][p], mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    const double mpk = m[p][k], mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    const double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
    }
    EigenSystem es;
    es.values.resize(d);
    es.vectors.assign(d, std::vector<double>(d));
    std::vector<std::size_t> order(d);
    for (std::size_t i = 0; i < d; ++i) order[i] = i;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j)
            if (m[order[j]][order[j]] < m[order[i]][order[i]]) std::swap(order[i], order[j]);
    for (std::size_t k = 0; k < d; ++k) {
        es.values[k] = m[order[k]][order[k]];
        for (std::size_t i = 0; i < d; ++i) es.vectors[k][i] = v[i][order[k]];
    }
    return es;
}

// Accepts eigenvalues down to -tol_psd and clips them to zero; anything
// lower is a genuine violation.
inline GaussMatrix make_psd(const GaussMatrix& A, double tol_psd) {
    const std::size_t d = A.dim();
    EigenSystem es = sym_eigen(A);
    bool dirty = false;
    for (double& lam : es.values) {
        if (lam < -tol_psd)
            throw std::invalid_argument("GaussMatrix: eigenvalue below psd tolerance");
        if (lam < 0.0) {
            lam = 0.0;
            dirty = true;
        }
    }
    if (!dirty) return A;
    GaussMatrix out(d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < d; ++k)
                s += es.values[k] * es.vectors[k][i] * es.vectors[k][j];
            out.set(i, j, s);
        }
    return out;
}

inline bool is_psd(const GaussMatrix& A, double tol_psd) {
    for (double lam : sym_eigen(A).values)
        if (lam < -tol_psd) return false;
    return true;
}

inline double lambda_max(const GaussMatrix& A) {
    const EigenSystem es = sym_eigen(A);
    return es.values.empty() ? 0.0 : es.values.back();
}

// A^{1/2} for sampling the Gaussian part.
inline GaussMatrix sym_sqrt(const GaussMatrix& A, double tol_psd) {
    const std::size_t d = A.dim();
    EigenSystem es = sym_eigen(A);
    GaussMatrix out(d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                double lam = es.values[k];
                if (lam < -tol_psd)
                    throw std::invalid_argument("sym_sqrt: matrix not psd");
                lam = std::max(lam, 0.0);
                s += std::sqrt(lam) * es.vectors[k][i] * es.vectors[k][j];
            }
            out.set(i, j, s);
        }
    return out;
}

// Deterministic evaluation grid: radii cycle through 8 fractions of the ball
// radius, directions come from a fixed hashed stream. Used by every module
// that compares characteristic functions pointwise.
inline std::vector<Vec> make_z_grid(std::size_t d, int count = 32, double radius = 5.0,
                                    std::uint64_t seed = 0) {
    std::vector<Vec> grid;
    grid.reserve(static_cast<std::size_t>(count));
    CounterRng rng(seed, 0xc01df00dull);
    for (int k = 0; k < count; ++k) {
        const double r = radius * ((k % 8) + 1) / 8.0;
        Vec dir(d);
        double n2 = 0.0;
        do {
            for (std::size_t i = 0; i < d; ++i) dir[i] = rng.normal();
            n2 = dot(dir, dir);
        } while (n2 < 1e-12);
        grid.push_back((r / std::sqrt(n2)) * dir);
    }
    return grid;
}

}  // namespace levynest
