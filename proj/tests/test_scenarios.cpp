#include "catch_amalgamated.hpp"

#include <cmath>

#include "helpers.hpp"

using namespace beq;
using namespace beqtest;
using Catch::Approx;

TEST_CASE("gaussian bump: basics and symmetry") {
    const GridSpec g = grid1(256);
    REQUIRE(sup_norm(gaussian_bump(g, {pi, 0, 0}, 0.0, two_pi / 10)) == 0.0);
    REQUIRE_THROWS_AS(gaussian_bump(g, {pi, 0, 0}, 1.0, 2.0 * g.spacing(0)), invalid_input);

    // center on a node: f(center + d) = f(center - d)
    const VectorField u = gaussian_bump(g, {pi, 0, 0}, 0.5, two_pi / 10);
    const int ic = 128;
    for (int d = 1; d < 128; ++d) {
        const double a = u.components[0].values[(ic + d) % 256];
        const double b = u.components[0].values[(ic - d + 256) % 256];
        REQUIRE(a == Approx(b).margin(1e-12));
    }
    REQUIRE(u.components[0].values[ic] == Approx(0.5).epsilon(1e-13));
}

TEST_CASE("gaussian bump: spectral tail below 1e-12 at the dealias cutoff") {
    const GridSpec g = grid1(256);
    const VectorField u = gaussian_bump(g, {pi, 0, 0}, 1.0, two_pi / 10);
    const SpectralField F = forward_transform(u.components[0]);
    double peak = 0.0, tail = 0.0;
    for (std::size_t m = 0; m < F.coefficients.size(); ++m) {
        const double mag = std::abs(F.coefficients[m]);
        peak = std::max(peak, mag);
        if (!dealias_keeps(g, static_cast<int>(m), 0, 0)) tail = std::max(tail, mag);
    }
    REQUIRE(tail < 1e-12 * peak);
}

TEST_CASE("band-limited random fields") {
    const GridSpec g = grid1(64);
    const VectorField a = band_limited_random(g, 42, 9, 0.7);
    const VectorField b = band_limited_random(g, 42, 9, 0.7);
    for (std::size_t m = 0; m < a.components[0].values.size(); ++m)
        REQUIRE(a.components[0].values[m] == b.components[0].values[m]); // bit-identical

    REQUIRE(sup_norm(a) == Approx(0.7).epsilon(1e-12));

    const SpectralField F = forward_transform(a.components[0]);
    const AxisFreq fr = freq_table(g, 0);
    for (std::size_t m = 0; m < F.coefficients.size(); ++m)
        if (std::abs(fr.k[m]) > 9) REQUIRE(std::abs(F.coefficients[m]) < 1e-14);

    REQUIRE_THROWS_AS(band_limited_random(g, 1, 22, 1.0), invalid_input); // 22 >= 64/3

    // different seeds give different fields
    const VectorField c = band_limited_random(g, 43, 9, 0.7);
    REQUIRE(max_abs_diff(a, c) > 1e-3);
}

TEST_CASE("periodic peakon: peak value and translation structure") {
    const GridSpec g = grid1(256);
    const VectorField u0 = periodic_peakon(g, 1.0, 0.0);
    REQUIRE(u0.components[0].values[0] == Approx(1.0).epsilon(1e-13)); // peak at x=0
    for (double v : u0.components[0].values) REQUIRE(v <= 1.0 + 1e-12);

    // shifting time by an exact number of cells permutes the samples
    const double h = g.spacing(0);
    const VectorField ut = periodic_peakon(g, 1.0, 17.0 * h);
    for (int i = 0; i < 256; ++i)
        REQUIRE(ut.components[0].values[i] ==
                Approx(u0.components[0].values[(i - 17 + 256) % 256]).epsilon(1e-12));

    REQUIRE_THROWS_AS(periodic_peakon(grid2(16), 1.0, 0.0), invalid_input);
    REQUIRE_THROWS_AS(periodic_peakon(g, 0.0, 0.0), invalid_input);
}

TEST_CASE("mollifier damps the spectral tail") {
    const GridSpec g = grid1(256);
    const VectorField u = periodic_peakon(g, 1.0, 0.0);
    const VectorField m = mollify(u, 20.0);
    const SpectralField F = forward_transform(m.components[0]);
    const AxisFreq fr = freq_table(g, 0);
    double tail = 0.0;
    for (std::size_t q = 0; q < F.coefficients.size(); ++q)
        if (std::abs(fr.k[q]) > 100) tail = std::max(tail, std::abs(F.coefficients[q]));
    REQUIRE(tail < 1e-5 * std::abs(F.coefficients[0]));
    REQUIRE(sup_norm(m) < sup_norm(u)); // smoothing lowers the crest
}

TEST_CASE("traveling-wave residual: exact zeros") {
    const GridSpec g = grid1(128);
    const BParams p = make_bparams(2.0, builtin_sobolev(1, 1.0), g);
    REQUIRE(traveling_wave_residual(make_vector(g), 1.0, p) == 0.0);

    VectorField c = make_vector(g);
    for (double& v : c.components[0].values) v = 0.8;
    REQUIRE(traveling_wave_residual(c, 0.8, p) < 1e-12);
}

TEST_CASE("peakon residual decreases under mollification refinement") {
    const GridSpec g = make_grid_1d(512, two_pi);
    const BParams p = make_bparams(2.0, builtin_sobolev(1, 1.0), g);
    const VectorField pk = periodic_peakon(g, 1.0, 0.0);
    double prev = std::numeric_limits<double>::infinity();
    for (double sigk : {8.0, 16.0, 32.0, 64.0}) {
        const double res = traveling_wave_residual(mollify(pk, sigk), 1.0, p);
        REQUIRE(res < prev);
        prev = res;
    }
}

TEST_CASE("generators are born band-limited (except the peakon)") {
    const GridSpec g = grid1(128);
    auto lossless = [&](const VectorField& u) {
        const ScalarField back = inverse_transform(dealias(forward_transform(u.components[0])));
        return max_abs_diff(back, u.components[0]);
    };
    REQUIRE(lossless(gaussian_bump(g, {pi, 0, 0}, 0.5, two_pi / 10)) < 1e-12);
    REQUIRE(lossless(band_limited_random(g, 7, 11, 1.0)) < 1e-13);
    REQUIRE(lossless(periodic_peakon(g, 1.0, 0.0)) > 1e-6); // cusp content above cutoff
}

TEST_CASE("mollified peakon holds its shape over one crossing at N = 2048") {
    const GridSpec g = make_grid_1d(2048, two_pi);
    const BParams p = make_bparams(2.0, builtin_sobolev(1, 1.0), g);
    const VectorField u0 = mollify(periodic_peakon(g, 1.0, 0.0), 100.0);
    RunConfig rc;
    rc.dt = 5e-4;
    rc.t_end = two_pi;
    rc.diagnostics_every = 1000000;
    const Trajectory t = run(SolverState::make_eulerian(0.0, u0), p, rc);
    REQUIRE(t.termination == "completed");
    const VectorField& uT = t.states.back().u;

    // Pearson correlation against the initial profile (one full crossing)
    const std::size_t n = g.size();
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += u0.components[0].values[i];
        mb += uT.components[0].values[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = u0.components[0].values[i] - ma;
        const double db = uT.components[0].values[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    REQUIRE(sab / std::sqrt(saa * sbb) >= 0.99);
}
