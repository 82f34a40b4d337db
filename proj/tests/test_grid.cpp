#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "relaxmm/quadrature.hpp"

using namespace relaxmm;

TEST_CASE("grid geometry") {
    const CartesianGrid g({2.0, 1.0, 3.0}, {5, 4, 7});
    CHECK(g.spacing()[0] * 4 == 2.0);
    CHECK(g.spacing()[1] * 3 == doctest::Approx(1.0));
    CHECK(g.spacing()[2] * 6 == 3.0);
    CHECK(g.node_count() == 140);
    CHECK(g.h_min() == doctest::Approx(1.0 / 3.0));
    for (std::size_t n = 0; n < g.node_count(); ++n) CHECK(g.index(g.node(n)) == n);
    CHECK(g.stride(0) == 1);
    CHECK(g.stride(1) == 5);
    CHECK(g.stride(2) == 20);
    CHECK(g.face_mask({0, 1, 1}) == 0b000001);
    CHECK(g.face_mask({4, 3, 6}) == 0b101010);
    CHECK_FALSE(g.on_boundary({1, 1, 1}));
    CHECK(g.on_axis_face({0, 1, 1}, 0));
    CHECK_FALSE(g.on_axis_face({0, 1, 1}, 1));
    CHECK(face_normal(3)[1] == 1.0);
    CHECK(face_normal(0)[0] == -1.0);
    CHECK_THROWS(CartesianGrid({1, 1, 1}, {3, 4, 4}));
    CHECK_THROWS(CartesianGrid({0, 1, 1}, {4, 4, 4}));

    const CartesianGrid p({6.0, 1.0, 1.0}, {12, 4, 4}, CartesianGrid::Topology::periodic);
    CHECK(p.spacing()[0] == 0.5);
    CHECK(p.face_mask({0, 0, 0}) == 0);
}

TEST_CASE("integrate_scalar") {
    const CartesianGrid box({2.0, 2.0, 2.0}, {5, 6, 7});
    CHECK(integrate_scalar(ScalarField(box, 1.0)) == doctest::Approx(8.0));

    const auto g = CartesianGrid::unit_cube(9);
    CHECK(integrate_scalar(sample_scalar(g, [](const Point& x) { return x[0]; })) == doctest::Approx(0.5));
    CHECK(integrate_scalar(sample_scalar(g, [](const Point& x) { return x[0] * x[1] * x[2]; })) ==
          doctest::Approx(0.125));

    const CartesianGrid s({1.0, 1.0, 1.0}, {33, 5, 5});
    const double v = integrate_scalar(sample_scalar(s, [](const Point& x) { return std::sin(std::numbers::pi * x[0]); }));
    const double exact = 2.0 / std::numbers::pi;
    // trapezoid error for sin(pi x) is ~ (pi^2 h^2 / 12) * exact
    CHECK(std::abs(v - exact) < 1e-3);
    CHECK(std::abs(v - exact) > 1e-5);

    // sub-box integral of a linear function is exact
    const NodeBox inner{{2, 2, 2}, {6, 6, 6}};
    CHECK(integrate_scalar(sample_scalar(g, [](const Point& x) { return x[1]; }), inner) ==
          doctest::Approx(0.5 * 0.125));

    // periodic: uniform weights, exact for trig modes
    const CartesianGrid p({2 * std::numbers::pi, 1.0, 1.0}, {16, 4, 4}, CartesianGrid::Topology::periodic);
    CHECK(integrate_scalar(sample_scalar(p, [](const Point& x) { return std::cos(x[0]) * std::cos(x[0]); })) ==
          doctest::Approx(std::numbers::pi));
}

TEST_CASE("integration is linear and monotone") {
    const auto g = CartesianGrid::unit_cube(6);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(-1, 1);
    ScalarField a(g), b(g);
    for (auto& v : a.raw()) v = d(rng);
    for (std::size_t n = 0; n < g.node_count(); ++n) b(0, n) = a(0, n) + std::abs(d(rng));
    CHECK(integrate_scalar(b) >= integrate_scalar(a));
    CHECK(integrate_scalar(2.0 * a + b) == doctest::Approx(2.0 * integrate_scalar(a) + integrate_scalar(b)));
}

TEST_CASE("l2_norm_squared") {
    const auto g = CartesianGrid::unit_cube(7);
    CHECK(l2_norm_squared(VectorField(g)) == 0.0);
    CHECK(l2_norm_squared(sample_vector(g, [](const Point&) { return Vec3{0.6, 0.0, 0.8}; })) == doctest::Approx(1.0));

    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> d(-1, 1);
    TensorField t(g);
    for (auto& v : t.raw()) v = d(rng);
    ScalarField w(g);
    for (auto& v : w.raw()) v = d(rng);

    // flat-loop oracle with per-axis trapezoid weights
    const double h = 1.0 / 6.0;
    double oracle = 0.0, oracle_w = 0.0;
    for (int k = 0; k < 7; ++k)
        for (int j = 0; j < 7; ++j)
            for (int i = 0; i < 7; ++i) {
                const double wt = (i % 6 == 0 ? 0.5 : 1.0) * (j % 6 == 0 ? 0.5 : 1.0) * (k % 6 == 0 ? 0.5 : 1.0) * h * h * h;
                const std::size_t n = g.index(i, j, k);
                double s = 0.0;
                for (std::size_t c = 0; c < 9; ++c) s += t(c, n) * t(c, n);
                oracle += wt * s;
                oracle_w += wt * s * w(0, n) * w(0, n);
            }
    CHECK(l2_norm_squared(t) == doctest::Approx(oracle).epsilon(1e-13));
    CHECK(l2_norm_squared(t, &w) == doctest::Approx(oracle_w).epsilon(1e-13));

    TensorField scaled = t;
    for (std::size_t c = 0; c < 9; ++c)
        for (std::size_t n = 0; n < g.node_count(); ++n) scaled(c, n) *= w(0, n);
    CHECK(l2_norm_squared(scaled) == doctest::Approx(l2_norm_squared(t, &w)).epsilon(1e-13));
}

TEST_CASE("field arithmetic and state consistency") {
    const auto g = CartesianGrid::unit_cube(4);
    VectorField a(g, 1.0), b(g, 2.0);
    a.axpy(3.0, b);
    CHECK(a(2, 5) == 7.0);
    const VectorField other(CartesianGrid::unit_cube(5));
    CHECK_THROWS(a += other);
    SimulationState s(g);
    CHECK_NOTHROW(s.check_consistent());
    s.P = TensorField(CartesianGrid::unit_cube(5));
    CHECK_THROWS(s.check_consistent());
}
