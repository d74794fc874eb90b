#include "catch_amalgamated.hpp"

#include <complex>
#include <random>

#include "helpers.hpp"

using namespace beq;
using namespace beqtest;
using Catch::Approx;

TEST_CASE("grid invariants are enforced") {
    REQUIRE_THROWS_AS(make_grid(0, {8, 1, 1}, {1, 1, 1}), invalid_input);
    REQUIRE_THROWS_AS(make_grid(4, {8, 8, 8}, {1, 1, 1}), invalid_input);
    REQUIRE_THROWS_AS(make_grid_1d(7, 1.0), invalid_input);   // odd
    REQUIRE_THROWS_AS(make_grid_1d(6, 1.0), invalid_input);   // too small
    REQUIRE_THROWS_AS(make_grid_1d(16, -1.0), invalid_input); // bad length
    const GridSpec g = make_grid(2, {16, 32, 1}, {1.0, 2.0, 1});
    REQUIRE(g.size() == 512);
    REQUIRE(g.spacing(0) == Approx(1.0 / 16));
    REQUIRE(g.cell_volume() == Approx(2.0 / 512));
}

TEST_CASE("forward transform of a constant is a single k=0 spike") {
    for (const GridSpec& g : {grid1(32), grid2(16, 1.0)}) {
        const SpectralField F = forward_transform(make_scalar(g, 1.0));
        // weighted square of the spike equals the torus volume
        const double w0 = std::norm(F.coefficients[0]) * g.cell_volume();
        REQUIRE(w0 == Approx(g.volume()).epsilon(1e-12));
        for (std::size_t m = 1; m < F.coefficients.size(); ++m)
            REQUIRE(std::abs(F.coefficients[m]) < 1e-12 * std::abs(F.coefficients[0]));
    }
}

TEST_CASE("sin(x) transforms to exactly two modes at k = +-1") {
    const GridSpec g = grid1(32);
    const SpectralField F =
        forward_transform(sample(g, [](auto x) { return std::sin(x[0]); }));
    const double scale = std::sqrt(32.0) / 2.0;
    REQUIRE(std::abs(F.coefficients[1] - std::complex<double>(0, -scale)) < 1e-12 * scale);
    REQUIRE(std::abs(F.coefficients[31] - std::complex<double>(0, scale)) < 1e-12 * scale);
    for (std::size_t m = 0; m < 32; ++m) {
        if (m == 1 || m == 31) continue;
        REQUIRE(std::abs(F.coefficients[m]) < 1e-12 * scale);
    }
}

TEST_CASE("inverse transform reconstructs closed forms") {
    const GridSpec g = grid1(32);
    SpectralField F{g, std::vector<std::complex<double>>(g.size())};
    F.coefficients[0] = 3.0 * std::sqrt(32.0);
    ScalarField f = inverse_transform(F);
    for (double v : f.values) REQUIRE(v == Approx(3.0).epsilon(1e-13));

    // modes +-1 with conjugate coefficients -i/2, +i/2 (times sqrt(N)) -> sin
    SpectralField S{g, std::vector<std::complex<double>>(g.size())};
    S.coefficients[1] = std::complex<double>(0, -0.5) * std::sqrt(32.0);
    S.coefficients[31] = std::complex<double>(0, 0.5) * std::sqrt(32.0);
    const ScalarField s = inverse_transform(S);
    REQUIRE(max_abs_diff(s, sample(g, [](auto x) { return std::sin(x[0]); })) < 1e-12);
}

TEST_CASE("round trip and Parseval on random and Gaussian fields") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (const GridSpec& g : {grid1(64), grid2(16, 3.0)}) {
        ScalarField f = make_scalar(g);
        for (double& v : f.values) v = dist(rng);
        const SpectralField F = forward_transform(f);
        REQUIRE(max_abs_diff(inverse_transform(F), f) < 1e-12);

        double l2sq = 0.0;
        for (double v : f.values) l2sq += v * v;
        l2sq *= g.cell_volume();
        double csq = 0.0;
        for (const auto& c : F.coefficients) csq += std::norm(c);
        csq *= g.cell_volume();
        REQUIRE(csq == Approx(l2sq).epsilon(1e-12));
    }
    const GridSpec g = grid1(64);
    const ScalarField bump =
        sample(g, [](auto x) { return std::exp(-std::pow(std::sin((x[0] - pi) / 2), 2) * 24) ; });
    REQUIRE(max_abs_diff(inverse_transform(forward_transform(bump)), bump) <
            1e-12 * sup_abs(bump));
}

TEST_CASE("inverse transform rejects asymmetric coefficients") {
    const GridSpec g = grid1(16);
    SpectralField F{g, std::vector<std::complex<double>>(g.size())};
    F.coefficients[1] = {1.0, 0.5};
    F.coefficients[15] = {1.0, 0.5}; // should be the conjugate
    REQUIRE_THROWS_AS(inverse_transform(F), invalid_input);
}

TEST_CASE("wavevector formula and range check") {
    const GridSpec ga = grid1(32, two_pi);
    REQUIRE(wavevector(ga, {1, 0, 0})[0] == Approx(1.0));
    REQUIRE(wavevector(ga, {0, 0, 0})[0] == 0.0);
    const GridSpec gb = grid1(32, 1.0);
    REQUIRE(wavevector(gb, {3, 0, 0})[0] == Approx(6.0 * pi).epsilon(1e-12));
    REQUIRE(wavevector(gb, {-16, 0, 0})[0] == Approx(-32.0 * pi).epsilon(1e-12));
    REQUIRE_THROWS_AS(wavevector(gb, {16, 0, 0}), invalid_input); // k = N/2 excluded
}

TEST_CASE("spectral differentiation is exact on trigonometric data") {
    const GridSpec g = grid1(32);
    const ScalarField sinx = sample(g, [](auto x) { return std::sin(x[0]); });
    REQUIRE(max_abs_diff(partial_derivative(sinx, 0),
                         sample(g, [](auto x) { return std::cos(x[0]); })) < 1e-12);
    REQUIRE(sup_abs(partial_derivative(make_scalar(g, 4.2), 0)) < 1e-13);
    const ScalarField s3 = sample(g, [](auto x) { return std::sin(3 * x[0]); });
    REQUIRE(max_abs_diff(partial_derivative(s3, 0),
                         sample(g, [](auto x) { return 3 * std::cos(3 * x[0]); })) < 1e-12);
}

TEST_CASE("derivative matches analytic mode sums to 1e-10") {
    const GridSpec g = grid2(32);
    const auto f = [](std::array<double, 3> x) {
        return std::sin(3 * x[0]) * std::cos(2 * x[1]) + 0.5 * std::cos(7 * x[0]);
    };
    const auto dfdx = [](std::array<double, 3> x) {
        return 3 * std::cos(3 * x[0]) * std::cos(2 * x[1]) - 3.5 * std::sin(7 * x[0]);
    };
    REQUIRE(max_abs_diff(partial_derivative(sample(g, f), 0), sample(g, dfdx)) < 1e-10);
}

TEST_CASE("jacobian entries and the finite-difference oracle") {
    const GridSpec g = grid2(32);
    const VectorField u = sample_vec(
        g, {[](auto x) { return std::sin(x[0]); }, [](auto) { return 0.0; }});
    const auto jac = jacobian(u);
    REQUIRE(max_abs_diff(jac[0], sample(g, [](auto x) { return std::cos(x[0]); })) < 1e-12);
    for (int e : {1, 2, 3}) REQUIRE(sup_abs(jac[e]) < 1e-12);

    VectorField c = make_vector(g);
    for (auto& comp : c.components)
        for (double& v : comp.values) v = 2.5;
    for (const auto& e : jacobian(c)) REQUIRE(sup_abs(e) < 1e-13);

    // central finite differences on the same grid agree to O(h^2)
    const VectorField r = band_limited_random(g, 11, 4, 1.0);
    const auto jr = jacobian(r);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const ScalarField& comp = r.components[i];
            ScalarField fd = make_scalar(g);
            const int n0 = g.points[0], n1 = g.points[1];
            const double h = g.spacing(j);
            for_each_node(g, [&](int i0, int i1, int, std::size_t m) {
                int p0 = i0, p1 = i1, q0 = i0, q1 = i1;
                if (j == 0) {
                    p0 = (i0 + 1) % n0;
                    q0 = (i0 - 1 + n0) % n0;
                } else {
                    p1 = (i1 + 1) % n1;
                    q1 = (i1 - 1 + n1) % n1;
                }
                fd.values[m] = (comp.values[flat_index(g, p0, p1)] -
                                comp.values[flat_index(g, q0, q1)]) /
                               (2.0 * h);
            });
            // |FD - exact| <= h^2/6 * sup|d^3 f| for smooth periodic f
            const ScalarField d3 = partial_derivative(partial_derivative(jr[i * 2 + j], j), j);
            const double tol = h * h / 6.0 * sup_abs(d3) * 1.25 + 1e-12;
            REQUIRE(max_abs_diff(fd, jr[i * 2 + j]) < tol);
        }
}

TEST_CASE("divergence equals the jacobian trace bit for bit") {
    const GridSpec g = grid2(32);
    const VectorField u = sample_vec(
        g, {[](auto x) { return std::sin(x[0]); }, [](auto x) { return std::sin(x[1]); }});
    REQUIRE(max_abs_diff(divergence(u),
                         sample(g, [](auto x) { return std::cos(x[0]) + std::cos(x[1]); })) <
            1e-12);

    // divergence-free field from a stream function
    const ScalarField psi = sample(g, [](auto x) { return std::sin(x[0]) * std::cos(2 * x[1]); });
    VectorField w = make_vector(g);
    w.components[0] = -1.0 * partial_derivative(psi, 1);
    w.components[1] = partial_derivative(psi, 0);
    REQUIRE(sup_abs(divergence(w)) < 1e-12);

    const VectorField r = band_limited_random(g, 3, 5, 1.0);
    const auto jac = jacobian(r);
    const ScalarField div = divergence(r);
    for (std::size_t m = 0; m < div.values.size(); ++m) {
        const double trace = jac[0].values[m] + jac[3].values[m];
        REQUIRE(div.values[m] == trace); // identical summation path
    }
}

TEST_CASE("two-thirds dealiasing") {
    const GridSpec g = grid1(32);
    SpectralField F{g, std::vector<std::complex<double>>(g.size())};
    F.coefficients[1] = {1.0, 0.0};   // k = 1 survives
    F.coefficients[12] = {1.0, 0.0};  // k = 12 > 32/3 zeroed
    F.coefficients[20] = {1.0, 0.0};  // k = -12 zeroed
    const SpectralField D = dealias(F);
    REQUIRE(std::abs(D.coefficients[1]) == 1.0);
    REQUIRE(std::abs(D.coefficients[12]) == 0.0);
    REQUIRE(std::abs(D.coefficients[20]) == 0.0);

    SECTION("idempotence and transform commutation on dealiased data") {
        const VectorField r = band_limited_random(g, 5, 9, 1.0);
        const SpectralField R = forward_transform(r.components[0]);
        const SpectralField once = dealias(R);
        const SpectralField twice = dealias(once);
        for (std::size_t m = 0; m < once.coefficients.size(); ++m)
            REQUIRE(once.coefficients[m] == twice.coefficients[m]);
        // on already-dealiased data the pair inverse(dealias(forward)) is the identity
        const ScalarField back = inverse_transform(dealias(forward_transform(r.components[0])));
        REQUIRE(max_abs_diff(back, r.components[0]) < 1e-12);
    }
}
