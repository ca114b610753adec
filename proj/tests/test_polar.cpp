#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "levynest/gamma_fit.hpp"
#include "levynest/polar.hpp"
#include "oracles.hpp"

using namespace levynest;

namespace {

PolarLevyMeasure one_dir(RadialPart rp, Vec xi) {
    PolarLevyMeasure nu;
    nu.components.push_back({std::move(xi), std::move(rp)});
    return nu;
}

StableMixRadial stable_one(double beta, double c) {
    StableMixRadial sm;
    sm.terms = {{beta, c}};
    return sm;
}

StableMixRadial stable_pair() {
    StableMixRadial sm;
    sm.terms = {{0.8, 0.4}, {1.5, 0.6}};
    return sm;
}

KGridRadial kgrid_fixture() {
    KGridRadial kg;
    kg.alpha_ref = 0.5;
    kg.grid = {0.25, 0.5, 1.0, 2.0, 4.0};
    kg.k_values = {1.0, 0.8, 0.5, 0.2};
    return kg;
}

HFunction make_hf(std::vector<std::vector<double>> rows, double u0 = -3.0,
                  double du = 0.05) {
    HFunction hf;
    hf.u0 = u0;
    hf.du = du;
    hf.h = std::move(rows);
    return hf;
}

std::vector<double> sample_exp(double rate, int n = 121, double u0 = -3.0,
                               double du = 0.05) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) v[static_cast<std::size_t>(j)] = std::exp(rate * (u0 + du * j));
    return v;
}

std::vector<double> sample_step(int n = 121, double u0 = -3.0, double du = 0.05,
                                double at = 0.0, double height = 1.0) {
    std::vector<double> v(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j)
        if (u0 + du * j >= at) v[static_cast<std::size_t>(j)] = height;
    return v;
}

// Mixture target built straight from atom data, for round-trip fitting.
std::vector<double> synth_h(const std::vector<std::pair<double, double>>& atoms,
                            double alpha, int n = 121, double u0 = -3.0,
                            double du = 0.05) {
    std::vector<double> v(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
        const double u = u0 + du * j;
        for (const auto& [beta, g] : atoms) v[static_cast<std::size_t>(j)] += g * std::exp((beta - alpha) * u);
    }
    return v;
}

}  // namespace

TEST_CASE("polar extraction of a single stable direction") {
    const auto pd = extract_polar(one_dir(stable_one(1.5, 1.0), Vec{1.0}), 0.5);
    REQUIRE(pd.has_value());
    REQUIRE(pd->directions.size() == 1);
    REQUIRE(pd->lambda[0] == Catch::Approx(1.0));
    REQUIRE(pd->norm_const == Catch::Approx(8.0 / 3.0).epsilon(1e-14));
    REQUIRE(pd->radii.size() == 121);
    REQUIRE(pd->radii.front() == Catch::Approx(std::exp(-3.0)).epsilon(1e-14));
    REQUIRE(pd->radii.back() == Catch::Approx(std::exp(3.0)).epsilon(1e-12));
    for (std::size_t j = 0; j < pd->radii.size(); j += 12)
        REQUIRE(pd->k[0][j] == Catch::Approx(1.0 / pd->radii[j]).epsilon(1e-13));
}

TEST_CASE("polar extraction rejects atomic radial parts") {
    AtomicRadial at;
    at.atoms = {{1.0, 1.0}};
    PolarLevyMeasure nu = one_dir(at, Vec{1.0});
    REQUIRE_FALSE(extract_polar(nu, 0.5).has_value());

    nu.components.push_back({Vec{-1.0}, stable_one(1.5, 1.0)});
    REQUIRE_FALSE(extract_polar(nu, 0.5).has_value());

    REQUIRE_THROWS_AS(extract_polar(nu, 2.0), std::invalid_argument);
}

TEST_CASE("polar extraction of the empty measure") {
    const auto pd = extract_polar(PolarLevyMeasure{}, 0.5);
    REQUIRE(pd.has_value());
    REQUIRE(pd->directions.empty());
    REQUIRE(pd->norm_const == 0.0);
}

TEST_CASE("identical radial parts on two directions split weight evenly") {
    PolarLevyMeasure nu = one_dir(stable_pair(), Vec{1.0, 0.0});
    nu.components.push_back({Vec{0.0, 1.0}, stable_pair()});
    const auto pd = extract_polar(nu, 0.5);
    REQUIRE(pd.has_value());
    REQUIRE(pd->directions.size() == 2);
    REQUIRE(pd->lambda[0] == Catch::Approx(0.5).epsilon(1e-14));
    REQUIRE(pd->lambda[1] == Catch::Approx(0.5).epsilon(1e-14));
    for (std::size_t j = 0; j < pd->radii.size(); j += 17)
        REQUIRE(pd->k[0][j] == Catch::Approx(pd->k[1][j]).epsilon(1e-14));
}

TEST_CASE("repeated directions merge before weighting") {
    PolarLevyMeasure nu = one_dir(stable_one(0.8, 0.4), Vec{1.0});
    nu.components.push_back({Vec{1.0}, stable_one(1.5, 0.6)});
    const auto pd = extract_polar(nu, 0.5);
    REQUIRE(pd.has_value());
    REQUIRE(pd->directions.size() == 1);
    REQUIRE(pd->lambda[0] == Catch::Approx(1.0));
    const auto pd2 = extract_polar(one_dir(stable_pair(), Vec{1.0}), 0.5);
    for (std::size_t j = 0; j < pd->radii.size(); j += 9)
        REQUIRE(pd->k[0][j] == Catch::Approx(pd2->k[0][j]).epsilon(1e-13));
}

TEST_CASE("kgrid samples carry the piecewise values at the reference exponent") {
    const auto pd = extract_polar(one_dir(kgrid_fixture(), Vec{1.0}), 0.5);
    REQUIRE(pd.has_value());
    REQUIRE(pd->norm_const == Catch::Approx(oracle::kgrid_ref_sqmin).epsilon(1e-13));
    const auto kg = kgrid_fixture();
    for (std::size_t j = 0; j < pd->radii.size(); j += 5)
        REQUIRE(pd->k[0][j] == Catch::Approx(kgrid_value(kg, pd->radii[j])).margin(1e-14));
}

TEST_CASE("direction weights balance the square-min mass") {
    PolarLevyMeasure nu = one_dir(kgrid_fixture(), Vec{1.0, 0.0});
    nu.components.push_back({Vec{0.0, 1.0}, stable_pair()});
    const auto pd = extract_polar(nu, 0.7);
    REQUIRE(pd.has_value());

    const double s_kg = square_min_mass(kgrid_fixture());
    const double s_sm = square_min_mass(stable_pair());
    const double total = s_kg + s_sm;
    REQUIRE(pd->lambda[0] + pd->lambda[1] == Catch::Approx(1.0).epsilon(1e-14));
    REQUIRE(pd->lambda[0] == Catch::Approx(s_kg / total).epsilon(1e-13));
    REQUIRE(pd->norm_const == Catch::Approx(total).epsilon(1e-13));

    // Rescaling each exact radial part by its gain must reproduce the
    // common mass, the direction-independence the weights are for.
    auto kg = kgrid_fixture();
    for (double& v : kg.k_values) v *= total / s_kg;
    auto sm = stable_pair();
    for (auto& t : sm.terms) t.c *= total / s_sm;
    const RunConfig cfg = default_config();
    REQUIRE(std::fabs(square_min_mass(kg) - pd->norm_const) <= cfg.tol_norm);
    REQUIRE(std::fabs(square_min_mass(sm) - pd->norm_const) <= cfg.tol_norm);
}

TEST_CASE("changing the reference exponent rebases the kernel pointwise") {
    PolarLevyMeasure nu = one_dir(kgrid_fixture(), Vec{1.0, 0.0});
    nu.components.push_back({Vec{0.0, 1.0}, stable_pair()});
    const auto lo = extract_polar(nu, 0.4);
    const auto hi = extract_polar(nu, 1.3);
    REQUIRE(lo.has_value());
    REQUIRE(hi.has_value());
    REQUIRE(lo->norm_const == Catch::Approx(hi->norm_const).epsilon(1e-14));
    for (std::size_t i = 0; i < lo->k.size(); ++i)
        for (std::size_t j = 0; j < lo->radii.size(); j += 7) {
            const double want = lo->k[i][j] * std::pow(lo->radii[j], 1.3 - 0.4);
            REQUIRE(hi->k[i][j] == Catch::Approx(want).epsilon(1e-10).margin(1e-12));
        }
}

TEST_CASE("h function reverses the radii onto a uniform log grid") {
    const auto pd = extract_polar(one_dir(stable_one(1.5, 1.0), Vec{1.0}), 0.5);
    const HFunction hf = h_function(*pd);
    REQUIRE(hf.u0 == Catch::Approx(-3.0).margin(1e-12));
    REQUIRE(hf.du == Catch::Approx(0.05).epsilon(1e-12));
    REQUIRE(hf.h.size() == 1);
    for (std::size_t j = 0; j < hf.h[0].size(); j += 11) {
        const double u = hf.u0 + hf.du * static_cast<double>(j);
        REQUIRE(hf.h[0][j] == Catch::Approx(std::exp(u)).epsilon(1e-12));
        REQUIRE(hf.h[0][j] == pd->k[0][pd->radii.size() - 1 - j]);
    }

    auto bad = *pd;
    bad.radii[3] *= 1.01;
    REQUIRE_THROWS_AS(h_function(bad), std::invalid_argument);
}

TEST_CASE("difference operator kills constants and telescopes exponentials") {
    const std::vector<double> ones(121, 1.0);
    for (int n = 1; n <= 5; ++n)
        REQUIRE(difference_op(ones, -3.0, 0.05, -1.0, 0.1, n) == 0.0);

    const auto f = sample_exp(1.0);
    const double want = std::pow(std::exp(0.1) - 1.0, 3);
    REQUIRE(difference_op(f, -3.0, 0.05, 0.0, 0.1, 3) ==
            Catch::Approx(want).epsilon(1e-11));
    const double want2 = std::exp(-0.5) * std::pow(std::exp(0.2) - 1.0, 2);
    REQUIRE(difference_op(f, -3.0, 0.05, -0.5, 0.2, 2) ==
            Catch::Approx(want2).epsilon(1e-11));

    // n = 0 is just evaluation.
    REQUIRE(difference_op(f, -3.0, 0.05, 1.0, 0.05, 0) ==
            Catch::Approx(std::exp(1.0)).epsilon(1e-13));
}

TEST_CASE("difference operator witnesses the step counterexample") {
    const auto f = sample_step();
    REQUIRE(difference_op(f, -3.0, 0.05, -0.05, 0.1, 2) == Catch::Approx(-1.0));
    REQUIRE(difference_op(f, -3.0, 0.05, -0.05, 0.1, 1) == Catch::Approx(1.0));
}

TEST_CASE("difference operator rejects off-lattice requests") {
    const auto f = sample_exp(1.0);
    REQUIRE_THROWS_AS(difference_op(f, -3.0, 0.05, 0.013, 0.1, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(difference_op(f, -3.0, 0.05, 0.0, 0.07, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(difference_op(f, -3.0, 0.05, 0.0, -0.1, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(difference_op(f, -3.0, 0.05, 2.9, 0.1, 3), std::out_of_range);
    REQUIRE_THROWS_AS(difference_op(f, -3.0, 0.05, 0.0, 0.1, -1), std::invalid_argument);
}

TEST_CASE("monotone order certifies exponentials and flags steps") {
    const RunConfig cfg = default_config();
    REQUIRE(monotone_order(make_hf({sample_exp(1.0)}), 6, cfg.tol_mono) == 6);
    REQUIRE(monotone_order(make_hf({sample_step()}), 6, cfg.tol_mono) == 1);
    REQUIRE(monotone_order(make_hf({std::vector<double>(121, 0.0)}), 6, cfg.tol_mono) == 6);

    auto neg = sample_exp(1.0);
    neg[40] = -1e-6;
    const auto prof = monotone_profile(make_hf({neg}), 6, cfg.tol_mono);
    REQUIRE(prof.order == -1);
    REQUIRE(prof.margin < 0.0);

    // Tiny dips inside tolerance do not spoil the certificate.
    auto wiggle = sample_exp(1.0);
    wiggle[40] -= 1e-13;
    REQUIRE(monotone_order(make_hf({wiggle}), 2, cfg.tol_mono) == 2);
}

TEST_CASE("monotone order reports the per-direction minimum") {
    const RunConfig cfg = default_config();
    const auto hf = make_hf({sample_exp(1.0), sample_step()});
    REQUIRE(monotone_order(hf, 5, cfg.tol_mono) == 1);
    const auto prof = monotone_profile(hf, 5, cfg.tol_mono);
    REQUIRE(prof.order == 1);
    REQUIRE(prof.margin == Catch::Approx(-1.0));
}

TEST_CASE("taking a pointwise max with a step never raises the order") {
    const RunConfig cfg = default_config();
    const auto base = sample_exp(1.0);
    const int before = monotone_order(make_hf({base}), 5, cfg.tol_mono);

    auto bumped = base;
    const double level = std::exp(0.5);
    for (std::size_t j = 0; j < bumped.size(); ++j) {
        const double u = -3.0 + 0.05 * static_cast<double>(j);
        if (u >= 0.0) bumped[j] = std::max(bumped[j], level);
    }
    const int after = monotone_order(make_hf({bumped}), 5, cfg.tol_mono);
    REQUIRE(after <= before);
    REQUIRE(after == 1);
}

TEST_CASE("delta margin diagnostic localizes the failure") {
    const auto step = sample_step();
    double worst = 0.0;
    for (std::size_t j = 0; j < step.size(); ++j)
        worst = std::min(worst, delta_margin_at(step, j, 4));
    REQUIRE(worst <= -1.0);
    const auto smooth = sample_exp(1.0);
    for (std::size_t j = 0; j < smooth.size(); j += 13)
        REQUIRE(delta_margin_at(smooth, j, 4) >= 0.0);
}

TEST_CASE("nnls solves small systems deterministically") {
    const std::vector<std::vector<double>> cols = {{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}};
    const auto r1 = nnls(cols, {1.0, -1.0});
    REQUIRE(r1.x[0] == Catch::Approx(1.0));
    REQUIRE(r1.x[1] == 0.0);
    REQUIRE(r1.x[2] == 0.0);

    const auto r2 = nnls(cols, {2.0, 3.0});
    double res0 = 2.0, res1 = 3.0;
    for (std::size_t j = 0; j < cols.size(); ++j) {
        res0 -= r2.x[j] * cols[j][0];
        res1 -= r2.x[j] * cols[j][1];
    }
    REQUIRE(std::fabs(res0) < 1e-12);
    REQUIRE(std::fabs(res1) < 1e-12);
    for (double v : r2.x) REQUIRE(v >= 0.0);

    REQUIRE_THROWS_AS(nnls({{1.0, 0.0}, {0.0, 1.0, 2.0}}, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("gamma fit recovers an exact dictionary member") {
    const auto pd = extract_polar(one_dir(stable_one(1.5, 1.0), Vec{1.0}), 0.5);
    const auto rep = fit_gamma(*pd, {0.7, 1.1, 1.5});
    REQUIRE(rep.fit_residual < 1e-10);
    double main = 0.0, stray = 0.0;
    for (const auto& a : rep.atoms)
        (std::fabs(a.beta - 1.5) < 1e-9 ? main : stray) += a.weight;
    REQUIRE(main == Catch::Approx(1.0).epsilon(1e-8));
    REQUIRE(stray < 1e-8);
    REQUIRE(normalization_gap(rep, *pd) < 1e-8);
}

TEST_CASE("gamma fit recovers a two-atom mixture on a containing grid") {
    const auto pd = extract_polar(one_dir(stable_pair(), Vec{1.0}), 0.5);
    std::vector<double> grid;
    for (int j = 0; j <= 74; ++j) grid.push_back(0.5 + 0.02 * j);
    const auto rep = fit_gamma(*pd, grid);
    REQUIRE(rep.fit_residual < 1e-10);

    double w08 = 0.0, w15 = 0.0, stray = 0.0;
    for (const auto& a : rep.atoms) {
        if (std::fabs(a.beta - 0.8) < 5e-3)
            w08 += a.weight;
        else if (std::fabs(a.beta - 1.5) < 5e-3)
            w15 += a.weight;
        else
            stray += a.weight;
    }
    REQUIRE(w08 == Catch::Approx(0.4).margin(1e-6));
    REQUIRE(w15 == Catch::Approx(0.6).margin(1e-6));
    REQUIRE(stray < 1e-6);
    REQUIRE(normalization_gap(rep, *pd) < 1e-8);
}

TEST_CASE("gamma fit refines off-grid atoms below the membership tolerance") {
    const RunConfig cfg = default_config();
    const auto pd = extract_polar(one_dir(stable_pair(), Vec{1.0}), 0.5);
    const auto rep = fit_gamma(*pd, default_beta_grid(0.5));
    REQUIRE(rep.fit_residual < cfg.tol_gamma);

    double w08 = 0.0, w15 = 0.0;
    for (const auto& a : rep.atoms) {
        if (std::fabs(a.beta - 0.8) < 0.01) w08 += a.weight;
        if (std::fabs(a.beta - 1.5) < 0.01) w15 += a.weight;
    }
    REQUIRE(w08 == Catch::Approx(0.4).margin(1e-3));
    REQUIRE(w15 == Catch::Approx(0.6).margin(1e-3));
}

TEST_CASE("gamma fit rejects a step kernel") {
    const RunConfig cfg = default_config();
    const auto hf = make_hf({sample_step(121, -3.0, 0.05, 0.0, 1.0)});
    const auto rep = fit_gamma(hf, 0.5, default_beta_grid(0.5), {1.0});
    REQUIRE(rep.fit_residual > cfg.tol_gamma);
    REQUIRE(rep.fit_residual > 1e-2);
}

TEST_CASE("gamma fit round trip on grid atoms") {
    const auto grid = default_beta_grid(0.3);
    const std::vector<std::pair<double, double>> atoms = {{grid[30], 0.7}, {grid[60], 0.25}};
    const auto hf = make_hf({synth_h(atoms, 0.3)});
    const auto rep = fit_gamma(hf, 0.3, grid, {1.0});
    REQUIRE(rep.fit_residual < 1e-10);
    for (const auto& [beta, g] : atoms) {
        double got = 0.0;
        for (const auto& a : rep.atoms)
            if (std::fabs(a.beta - beta) < 1e-9) got += a.weight;
        REQUIRE(got == Catch::Approx(g).epsilon(1e-6));
    }
}

TEST_CASE("gamma fit splits atoms across directions") {
    PolarLevyMeasure nu = one_dir(stable_one(0.8, 0.5), Vec{1.0, 0.0});
    nu.components.push_back({Vec{0.0, 1.0}, stable_one(1.5, 0.25)});
    const auto pd = extract_polar(nu, 0.5);
    std::vector<double> grid;
    for (int j = 0; j <= 74; ++j) grid.push_back(0.5 + 0.02 * j);
    const auto rep = fit_gamma(*pd, grid);
    REQUIRE(rep.fit_residual < 1e-9);

    double w08 = 0.0, w15 = 0.0, w08_dir0 = 0.0, w15_dir1 = 0.0;
    for (std::size_t j = 0; j < rep.atoms.size(); ++j) {
        double row = 0.0;
        for (double v : rep.lambda_beta[j]) row += v;
        REQUIRE(row == Catch::Approx(1.0).epsilon(1e-12));
        if (std::fabs(rep.atoms[j].beta - 0.8) < 5e-3) {
            w08 += rep.atoms[j].weight;
            w08_dir0 += rep.atoms[j].weight * rep.lambda_beta[j][0];
        }
        if (std::fabs(rep.atoms[j].beta - 1.5) < 5e-3) {
            w15 += rep.atoms[j].weight;
            w15_dir1 += rep.atoms[j].weight * rep.lambda_beta[j][1];
        }
    }
    REQUIRE(w08 == Catch::Approx(0.5).margin(1e-7));
    REQUIRE(w15 == Catch::Approx(0.25).margin(1e-7));
    REQUIRE(w08_dir0 == Catch::Approx(w08).epsilon(1e-7));
    REQUIRE(w15_dir1 == Catch::Approx(w15).epsilon(1e-7));
    REQUIRE(normalization_gap(rep, *pd) < 1e-8);
}

TEST_CASE("gamma fit input validation") {
    const auto hf = make_hf({sample_exp(1.0)});
    REQUIRE_THROWS_AS(fit_gamma(hf, 0.5, {}, {1.0}), std::invalid_argument);
    auto bad = hf;
    bad.h[0][10] = -0.5;
    REQUIRE_THROWS_AS(fit_gamma(bad, 0.5, default_beta_grid(0.5), {1.0}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(fit_gamma(hf, 0.5, default_beta_grid(0.5), {0.5, 0.5}),
                      std::invalid_argument);

    const auto zero = fit_gamma(make_hf({std::vector<double>(121, 0.0)}), 0.5,
                                default_beta_grid(0.5), {1.0});
    REQUIRE(zero.fit_residual == 0.0);
    REQUIRE(zero.atoms.empty());
}
