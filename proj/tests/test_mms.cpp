#include <cmath>

#include "doctest.h"
#include "relaxmm/mms.hpp"
#include "relaxmm/quadrature.hpp"

using namespace relaxmm;

namespace {

const MaterialParameters kMixed{2.0, 1.0, 0.5, 1.5, 0.25, 0.7};

struct SourceSample {
    const char* name;
    MaterialParameters p;
    Point x;
    double t;
    Vec3 f;
    std::array<double, 9> M;
};

// Values from tests/oracles/mms_sources.py (sympy differentiation of the closed forms).
const SourceSample kSamples[] = {
    {"trig1", kReferenceParameters, {0.5, 0.5, 0.5}, 0.0,
     {3.485009907363948e+01, 1.773920880217872e+01, -1.138287852396119e+01},
     {0, 0, 0, 0, 0, 0, 0, 0, 0}},
    {"trig1", kReferenceParameters, {0.3, 0.6, 0.8}, 0.4,
     {1.026183209005435e+01, 6.692133046451334e+00, -7.645517714884986e-01},
     {-8.273877273735057e-02, -2.977257620237099e-01, 5.271640799436051e+00, -8.133166841344588e-02,
      9.278925589528291e-01, -1.770979150637382e+00, 2.342924975419286e+00, 7.075836778174069e-01,
      -6.812264227273357e-01}},
    {"trig1", kMixed, {0.5, 0.5, 0.5}, 0.0,
     {9.312524768409870e+01, 4.734802200544679e+01, -2.995719630990298e+01},
     {0, 0, 0, 0, 0, 0, 0, 0, 0}},
    {"trig1", kMixed, {0.3, 0.6, 0.8}, 0.4,
     {2.769083542538135e+01, 1.769649920516062e+01, -3.056027355893356e+00},
     {-2.673988835306037e+00, 7.622415972766491e-02, 6.713260864936069e+00, -4.472536508266292e-01,
      2.039545663787939e-01, -3.358591816387375e-01, 3.381684981720432e+00, 7.183592403727467e-01,
      -2.553642784907651e+00}},
    {"trig-mixed", kMixed, {0.3, 0.6, 0.8}, 0.4,
     {2.747311457871036e+01, 1.769294333488781e+01, -3.071090264088151e+00},
     {-2.608643603636827e+00, 1.088937178591087e-01, 6.851651333975747e+00, -4.472536508266292e-01,
      2.083089833122136e-01, -3.358591816387375e-01, 3.381684981720432e+00, 7.183592403727467e-01,
      -2.549288367974231e+00}},
    {"poly2", kReferenceParameters, {0.5, 0.5, 0.5}, 0.0,
     {2.7625, 3.355, 1.58},
     {7.875e-01, 2.725, 2.075, 2.8625, -1.475e-01, 2.47, 2.505, 2.6275, 3.3575}},
    {"poly2", kMixed, {0.3, 0.6, 0.8}, 0.4,
     {4.4766, 5.13, 1.0697},
     {-1.0123875, 5.48552, 3.05554, 3.58812, -6.4360675, 2.156455, 3.297155, 2.4358, 2.1105725}},
};

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

TEST_CASE("manufactured sources match the symbolic oracle") {
    for (const auto& s : kSamples) {
        CAPTURE(s.name);
        CAPTURE(s.t);
        const auto mc = manufactured_case(s.name);
        const Vec3 f = mc.body_force(s.p, s.x, s.t);
        const Tensor3 M = mc.body_moment(s.p, s.x, s.t);
        for (std::size_t i = 0; i < 3; ++i) CHECK(f[i] == doctest::Approx(s.f[i]).epsilon(1e-12).scale(1.0));
        for (std::size_t q = 0; q < 9; ++q) CHECK(M.a[q] == doctest::Approx(s.M[q]).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("catalog lookup") {
    for (const auto& n : manufactured_case_names()) CHECK(manufactured_case(n).name() == n);
    CHECK_THROWS_WITH_AS(manufactured_case("trig2"), doctest::Contains("catalog"), std::invalid_argument);
}

TEST_CASE("zero case has zero sources and state") {
    const auto mc = manufactured_case("zero");
    const auto g = CartesianGrid::unit_cube(5);
    const auto src = mc.sources(kMixed, g);
    VectorField f(g, 1.0);
    TensorField M(g, 1.0);
    src.f(0.3, f);
    src.M(0.3, M);
    CHECK(max_abs(f.raw()) == 0.0);
    CHECK(max_abs(M.raw()) == 0.0);
    const auto s = mc.exact_state(g, 0.7);
    CHECK(max_abs(s.u.raw()) == 0.0);
    CHECK(max_abs(s.P_t.raw()) == 0.0);
}

TEST_CASE("closed-form derivatives agree with finite differences") {
    const double e = 1e-5;
    for (const auto& name : manufactured_case_names()) {
        CAPTURE(name);
        const auto mc = manufactured_case(name);
        const Point x{0.31, 0.58, 0.77};
        const double t = 0.37;
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(mc.u_t(x, t)[i] == doctest::Approx((mc.u(x, t + e)[i] - mc.u(x, t - e)[i]) / (2 * e)).epsilon(1e-7));
            CHECK(mc.u_tt(x, t)[i] ==
                  doctest::Approx((mc.u_t(x, t + e)[i] - mc.u_t(x, t - e)[i]) / (2 * e)).epsilon(1e-7));
        }
        for (std::size_t q = 0; q < 9; ++q) {
            CHECK(mc.P_t(x, t).a[q] ==
                  doctest::Approx((mc.P(x, t + e).a[q] - mc.P(x, t - e).a[q]) / (2 * e)).epsilon(1e-7).scale(1.0));
            CHECK(mc.P_tt(x, t).a[q] ==
                  doctest::Approx((mc.P_t(x, t + e).a[q] - mc.P_t(x, t - e).a[q]) / (2 * e)).epsilon(1e-7).scale(1.0));
        }
        Tensor3 grad, dP[3];
        for (int j = 0; j < 3; ++j) {
            Point a = x, b = x;
            a[static_cast<std::size_t>(j)] += e;
            b[static_cast<std::size_t>(j)] -= e;
            const Vec3 ua = mc.u(a, t), ub = mc.u(b, t);
            for (int i = 0; i < 3; ++i)
                grad(i, j) = (ua[static_cast<std::size_t>(i)] - ub[static_cast<std::size_t>(i)]) / (2 * e);
            dP[j] = (1.0 / (2 * e)) * (mc.P(a, t) - mc.P(b, t));
        }
        const Tensor3 curl = mc.curl_P(x, t);
        for (int i = 0; i < 3; ++i)
            for (int c = 0; c < 3; ++c) {
                const int b = (c + 1) % 3, d = (c + 2) % 3;
                CHECK(mc.grad_u(x, t)(i, c) == doctest::Approx(grad(i, c)).epsilon(1e-7).scale(1.0));
                CHECK(curl(i, c) == doctest::Approx(dP[b](i, d) - dP[d](i, b)).epsilon(1e-7).scale(1.0));
            }
    }
}

TEST_CASE("cached sources reproduce the pointwise closed forms") {
    const auto g = CartesianGrid::unit_cube(6);
    for (const auto& name : manufactured_case_names()) {
        const auto mc = manufactured_case(name);
        const auto src = mc.sources(kMixed, g);
        VectorField f(g);
        TensorField M(g);
        src.f(0.45, f);
        src.M(0.45, M);
        for (std::size_t q = 0; q < g.node_count(); ++q) {
            const Point x = g.position(q);
            const Vec3 fe = mc.body_force(kMixed, x, 0.45);
            const Tensor3 Me = mc.body_moment(kMixed, x, 0.45);
            for (std::size_t i = 0; i < 3; ++i) CHECK(f(i, q) == doctest::Approx(fe[i]).epsilon(1e-12).scale(1.0));
            for (std::size_t c = 0; c < 9; ++c) CHECK(M(c, q) == doctest::Approx(Me.a[c]).epsilon(1e-12).scale(1.0));
        }
    }
}

TEST_CASE("initial data of every case is compatible with its boundary data") {
    const auto g = CartesianGrid::unit_cube(7);
    for (const auto& name : manufactured_case_names()) {
        const auto mc = manufactured_case(name);
        const auto s = mc.exact_state(g, 0.0);
        CHECK(check_compatibility(s.u, s.u_t, s.P, s.P_t, mc.boundary_data(), 1e-9).ok());
    }
}

TEST_CASE("discrete residual of the manufactured solution") {
    // rhs(exact state) - exact accelerations at free dofs
    auto residual = [](const ManufacturedCase& mc, const MaterialParameters& p, int N, bool interior_only) {
        const auto g = CartesianGrid::unit_cube(N);
        const double t = 0.3;
        const auto s = mc.exact_state(g, t);
        const auto acc = rhs(s, p, mc.sources(p, g), t);
        const Constraints cons(g);
        VectorField ru = acc.a_u;
        TensorField rP = acc.a_P;
        for (std::size_t q = 0; q < g.node_count(); ++q) {
            const Point x = g.position(q);
            const Vec3 a = mc.u_tt(x, t);
            const Tensor3 A = mc.P_tt(x, t);
            for (std::size_t c = 0; c < 3; ++c) ru(c, q) -= a[c];
            for (std::size_t c = 0; c < 9; ++c) rP(c, q) -= A.a[c];
        }
        cons.clear(ru);
        cons.clear(rP);
        double m = 0.0;
        const NodeBox inner = aligned_node_box(g, Box{{0.25, 0.25, 0.25}, {0.75, 0.75, 0.75}});
        for (std::size_t q = 0; q < g.node_count(); ++q) {
            if (interior_only && !inner.contains(g.node(q))) continue;
            for (std::size_t c = 0; c < 3; ++c) m = std::max(m, std::abs(ru(c, q)));
            for (std::size_t c = 0; c < 9; ++c) m = std::max(m, std::abs(rP(c, q)));
        }
        return m;
    };

    SUBCASE("poly2 is exact at every free node") {
        const auto mc = manufactured_case("poly2");
        CHECK(residual(mc, kMixed, 5, false) < 1e-11);
        CHECK(residual(mc, kMixed, 9, false) < 1e-11);
    }
    SUBCASE("trig1 converges at second order at every free node") {
        const auto mc = manufactured_case("trig1");
        const double r9 = residual(mc, kMixed, 9, false), r17 = residual(mc, kMixed, 17, false),
                     r33 = residual(mc, kMixed, 33, false);
        CHECK(residual(mc, kMixed, 33, true) <= r33);
        CHECK(std::log2(r9 / r17) == doctest::Approx(2.0).epsilon(0.1));
        CHECK(std::log2(r17 / r33) == doctest::Approx(2.0).epsilon(0.1));
    }
}

TEST_CASE("order fitting") {
    const std::vector<double> h{0.25, 0.125, 0.0625};
    CHECK(fit_order(h, {3.0 * 0.0625, 3.0 * 0.015625, 3.0 * 0.00390625}) == doctest::Approx(2.0));
    CHECK(fit_order(h, {0.5, 0.25, 0.125}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(fit_order({0.1}, {1.0}), std::invalid_argument);

    const auto good = fit_errors("e", h, {1e-2, 2.5e-3, 6.25e-4}, 1e-10);
    REQUIRE(good.order);
    CHECK(*good.order == doctest::Approx(2.0));
    CHECK(good.max_error == 1e-2);

    const auto bumpy = fit_errors("e", h, {1e-2, 2e-2, 1e-3}, 1e-10);
    CHECK(bumpy.non_monotone);
    CHECK_FALSE(bumpy.order);

    const auto floor = fit_errors("e", h, {1e-15, 3e-15, 2e-15}, 1e-10);
    CHECK(floor.at_floor);
    CHECK_FALSE(floor.non_monotone);
    CHECK_FALSE(floor.order);
}

TEST_CASE("convergence study: poly2 sits at the floor") {
    const auto st = convergence_study(manufactured_case("poly2"), {5, 9}, 0.1);
    REQUIRE(st.rows.size() == 2);
    for (const auto& f : st.fits) {
        CAPTURE(f.metric);
        CHECK(f.at_floor);
        CHECK(f.max_error < 1e-10);
    }
    CHECK_THROWS_AS(convergence_study(manufactured_case("poly2"), {9, 9}, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(convergence_study(manufactured_case("poly2"), {}, 0.1), std::invalid_argument);
}

TEST_CASE("convergence study: trig1 on coarse grids") {
    const auto st = convergence_study(manufactured_case("trig1"), {9, 17}, 0.1);
    for (const auto& r : st.rows) {
        CHECK(r.u_interior <= r.u_global);
        CHECK(r.P_interior <= r.P_global);
        CHECK(r.steps > 0);
    }
    for (const char* m : {"u_interior", "P_interior", "u_global", "P_global"}) {
        CAPTURE(m);
        REQUIRE(st.fit(m).order);
        CHECK(*st.fit(m).order > 1.5);
    }
}

TEST_CASE("time refinement at fixed grid is second order") {
    const auto mc = manufactured_case("trig1");
    const auto g = CartesianGrid::unit_cube(9);
    const double T = 0.2;
    const double dt0 = cfl_timestep(kReferenceParameters, g, 0.9);
    std::vector<VectorField> finals;
    for (double scale : {1.0, 0.5, 0.25}) {
        RunSettings rs;
        rs.T = T;
        rs.dt = dt0 * scale;
        rs.record_every = 1u << 30;
        VectorField last(g);
        rs.on_record = [&](const SimulationState& s, std::size_t) { last = s.u; };
        run_simulation(mc.exact_state(g, 0.0), kReferenceParameters, mc.sources(kReferenceParameters, g),
                       mc.boundary_data(), rs);
        finals.push_back(last);
    }
    // self-convergence removes the spatial error
    const double d1 = std::sqrt(l2_norm_squared(VectorField(finals[0] - finals[1])));
    const double d2 = std::sqrt(l2_norm_squared(VectorField(finals[1] - finals[2])));
    CHECK(std::log2(d1 / d2) == doctest::Approx(2.0).epsilon(0.1));
}
