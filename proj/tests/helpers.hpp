#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>

#include "beq/beq.hpp"

namespace beqtest {

using beq::GridSpec;
using beq::ScalarField;
using beq::VectorField;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline GridSpec grid1(int n = 32, double len = two_pi) { return beq::make_grid_1d(n, len); }

inline GridSpec grid2(int n = 32, double len = two_pi) {
    return beq::make_grid(2, {n, n, 1}, {len, len, 1});
}

// Sample a closed-form function on the grid.
inline ScalarField sample(const GridSpec& g, const std::function<double(std::array<double, 3>)>& f) {
    ScalarField s = beq::make_scalar(g);
    beq::for_each_node(g, [&](int i0, int i1, int i2, std::size_t m) {
        s.values[m] = f(beq::node_point(g, i0, i1, i2));
    });
    return s;
}

inline VectorField sample_vec(
    const GridSpec& g,
    const std::vector<std::function<double(std::array<double, 3>)>>& comps) {
    VectorField u = beq::make_vector(g);
    for (int c = 0; c < g.dim; ++c) u.components[c] = sample(g, comps[c]);
    return u;
}

inline double max_abs_diff(const ScalarField& a, const ScalarField& b) {
    double s = 0.0;
    for (std::size_t m = 0; m < a.values.size(); ++m)
        s = std::max(s, std::abs(a.values[m] - b.values[m]));
    return s;
}

inline double max_abs_diff(const VectorField& a, const VectorField& b) {
    double s = 0.0;
    for (int c = 0; c < a.grid.dim; ++c) s = std::max(s, max_abs_diff(a.components[c], b.components[c]));
    return s;
}

inline beq::BParams params1d(double b, double s, int n = 32, double len = two_pi) {
    const GridSpec g = grid1(n, len);
    return beq::make_bparams(b, beq::builtin_sobolev(1, s), g);
}

} // namespace beqtest
