#include <cmath>
#include <limits>
#include <random>

#include "dense_oracle.hpp"
#include "doctest.h"
#include "relaxmm/dynamics.hpp"
#include "relaxmm/initial_data.hpp"
#include "relaxmm/quadrature.hpp"

using namespace relaxmm;

namespace {

SimulationState random_state(const CartesianGrid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    SimulationState s(g);
    for (auto& v : s.u.raw()) v = d(rng);
    for (auto& v : s.u_t.raw()) v = d(rng);
    for (auto& v : s.P.raw()) v = d(rng);
    for (auto& v : s.P_t.raw()) v = d(rng);
    return s;
}

Eigen::VectorXd flatten(const VectorField& u, const TensorField& P) {
    const auto N = static_cast<Eigen::Index>(u.nodes());
    Eigen::VectorXd x(12 * N);
    for (Eigen::Index q = 0; q < 3 * N; ++q) x(q) = u.raw()[static_cast<std::size_t>(q)];
    for (Eigen::Index q = 0; q < 9 * N; ++q) x(3 * N + q) = P.raw()[static_cast<std::size_t>(q)];
    return x;
}

template <std::size_t NC>
double max_abs(const NodeField<NC>& f) {
    double m = 0.0;
    for (double v : f.raw()) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

TEST_CASE("rhs examples") {
    const auto g = CartesianGrid::unit_cube(5);
    const MaterialParameters p{1.5, 0.3, 0.4, 0.9, 0.2, 0.8};
    for (Closure c : {Closure::one_sided, Closure::summation_by_parts}) {
        const auto zero = rhs(SimulationState(g), p, {}, 0.0, c);
        CHECK(max_abs(zero.a_u) == 0.0);
        CHECK(max_abs(zero.a_P) == 0.0);

        Tensor3 A;
        for (int q = 0; q < 9; ++q) A.a[static_cast<std::size_t>(q)] = 0.3 * q - 1.0;
        SimulationState s(g);
        s.u = sample_vector(g, [&](const Point& x) { return matvec(A, x); });
        s.P = sample_tensor(g, [&](const Point&) { return A; });
        const auto a = rhs(s, p, {}, 0.0, c);
        CHECK(max_abs(a.a_u) < 1e-12);
        const Tensor3 expect = -1.0 * micro_stress(p, A);
        for (std::size_t q = 0; q < g.node_count(); ++q) CHECK(norm_squared(get_tensor(a.a_P, q) - expect) < 1e-22);
    }
}

TEST_CASE("rhs matches dense operator assembly") {
    const CartesianGrid g({1.0, 1.2, 0.9}, {5, 5, 6});
    const MaterialParameters p{1.5, 0.3, 0.4, 0.9, 0.2, 0.8};
    const auto s = random_state(g, 3);
    for (bool sbp : {false, true}) {
        const oracle::Assembly A(g, sbp);
        const Eigen::VectorXd expect = A.rhs(p) * flatten(s.u, s.P);
        const auto a = rhs(s, p, {}, 0.0, sbp ? Closure::summation_by_parts : Closure::one_sided);
        const Eigen::VectorXd got = flatten(a.a_u, a.a_P);
        CHECK((got - expect).cwiseAbs().maxCoeff() < 1e-10 * expect.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("rhs is minus the weighted gradient of the potential energy at free dofs") {
    const CartesianGrid g({1.0, 1.0, 1.0}, {5, 6, 5});
    const MaterialParameters p{1.5, 0.3, 0.4, 0.9, 0.2, 0.8};
    SimulationState s = random_state(g, 4);
    SimulationState d = random_state(g, 5);
    const Constraints con(g);
    con.clear(s.u);
    con.clear(s.P);
    con.clear(d.u);
    con.clear(d.P);
    const auto a = rhs(s, p, {}, 0.0);
    const auto w = quadrature_weights(g);
    double power = 0.0;
    for (std::size_t q = 0; q < g.node_count(); ++q) {
        for (std::size_t c = 0; c < 3; ++c) power += w(0, q) * a.a_u(c, q) * d.u(c, q);
        for (std::size_t c = 0; c < 9; ++c) power += w(0, q) * a.a_P(c, q) * d.P(c, q);
    }
    // V is quadratic, so the centered difference is exact up to roundoff
    auto potential = [&](double eps) {
        SimulationState t = s;
        t.u.axpy(eps, d.u);
        t.P.axpy(eps, d.P);
        return total_energy(t, p).potential();
    };
    const double dV = (potential(1e-3) - potential(-1e-3)) / 2e-3;
    CHECK(power == doctest::Approx(-dV).epsilon(1e-9));
}

TEST_CASE("sources enter the accelerations") {
    const auto g = CartesianGrid::unit_cube(4);
    SourceTerms src;
    src.f = [](double t, VectorField& f) { f.fill(t); };
    src.M = [](double t, TensorField& M) { M.fill(2 * t); };
    const auto a = rhs(SimulationState(g), kReferenceParameters, src, 1.5);
    CHECK(a.a_u(1, 7) == 1.5);
    CHECK(a.a_P(4, 9) == 3.0);
}

TEST_CASE("cfl_timestep") {
    const auto g = CartesianGrid::unit_cube(17);
    const double dt = cfl_timestep(kReferenceParameters, g, 1.0);
    // omega_max^2 = 1.516171262393e4 from the factorized plane-wave oracle
    CHECK(dt == doctest::Approx(5.075816193847e-04).epsilon(1e-10));
    CHECK(cfl_timestep(kReferenceParameters.scaled(2.0), g, 1.0) == doctest::Approx(dt / std::sqrt(2.0)));
    CHECK(cfl_timestep(kReferenceParameters, g, 0.5) == doctest::Approx(0.5 * dt));
    CHECK_THROWS(cfl_timestep(kReferenceParameters, g, 0.0));
    CHECK_THROWS(cfl_timestep(kReferenceParameters, g, 1.5));
    CHECK_THROWS(cfl_timestep({0.0, 0, 0, 1, 0, 1}, g, 0.5));
}

TEST_CASE("leapfrog basics") {
    const auto g = CartesianGrid::unit_cube(6);
    const auto bc = BoundaryData::homogeneous();
    const double dt = 1e-3;
    const auto z = step_leapfrog(SimulationState(g), kReferenceParameters, {}, bc, dt);
    CHECK(max_abs(z.u) == 0.0);
    CHECK(max_abs(z.P_t) == 0.0);
    CHECK(z.time == dt);

    SimulationState s(g);
    s.u_t.fill(0.7);
    const auto s1 = step_leapfrog(s, kReferenceParameters, {}, bc, dt);
    for (std::size_t q = 0; q < g.node_count(); ++q) {
        const auto n = g.node(q);
        for (std::size_t c = 0; c < 3; ++c) CHECK(s1.u(c, q) == (g.on_boundary(n) ? 0.0 : doctest::Approx(0.7 * dt)));
    }

    CHECK_THROWS(LeapfrogIntegrator(kReferenceParameters, {}, bc, 0.0));
    SimulationState bad(g);
    bad.u(0, g.index(2, 2, 2)) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(step_leapfrog(bad, kReferenceParameters, {}, bc, dt), NumericalInstability);
}

TEST_CASE("homogeneous run conserves energy, pins the boundary and superposes") {
    const auto g = CartesianGrid::unit_cube(9);
    const auto p = kReferenceParameters;
    const auto bc = BoundaryData::homogeneous();
    const auto a = random_band_limited_state(g, 2, 1);
    const auto b = random_band_limited_state(g, 2, 2);
    RunSettings rs;
    rs.dt = 0.5 * cfl_timestep(p, g, 1.0);
    rs.steps = 200;
    rs.keep_states = true;
    rs.record_every = 50;
    const auto ta = run_simulation(a, p, {}, bc, rs);
    const auto tb = run_simulation(b, p, {}, bc, rs);
    REQUIRE(ta.records.size() == 5);
    const double e0 = ta.records[0].energy.total;
    for (const auto& r : ta.records) CHECK(std::abs(r.energy.total - e0) < 1e-4 * e0);

    const Constraints con(g);
    const auto& last = ta.states.back();
    for (std::size_t q : con.u_nodes())
        for (std::size_t c = 0; c < 3; ++c) {
            CHECK(last.u(c, q) == 0.0);
            CHECK(last.u_t(c, q) == 0.0);
        }
    for (int j = 0; j < 3; ++j)
        for (std::size_t q : con.P_nodes(j))
            for (std::size_t i = 0; i < 3; ++i) CHECK(last.P(3 * i + static_cast<std::size_t>(j), q) == 0.0);

    SimulationState c = a;
    c.u *= 2.0;
    c.u_t *= 2.0;
    c.P *= 2.0;
    c.P_t *= 2.0;
    c.u.axpy(-3.0, b.u);
    c.u_t.axpy(-3.0, b.u_t);
    c.P.axpy(-3.0, b.P);
    c.P_t.axpy(-3.0, b.P_t);
    const auto tc = run_simulation(c, p, {}, bc, rs);
    const auto& sc = tc.states.back();
    VectorField combo = 2.0 * ta.states.back().u;
    combo.axpy(-3.0, tb.states.back().u);
    CHECK(max_abs(combo - sc.u) < 1e-12 * max_abs(sc.u));
}

TEST_CASE("run_simulation bookkeeping") {
    const auto g = CartesianGrid::unit_cube(5);
    RunSettings rs;
    rs.T = 0.0;
    auto t = run_simulation(SimulationState(g), kReferenceParameters, {}, BoundaryData::homogeneous(), rs);
    REQUIRE(t.records.size() == 1);
    CHECK(t.records[0].energy.total == 0.0);

    rs.T = 0.05;
    rs.record_every = 7;
    int snaps = 0;
    rs.snapshot_every = 10;
    rs.on_snapshot = [&](const SimulationState&, std::size_t) { ++snaps; };
    t = run_simulation(SimulationState(g), kReferenceParameters, {}, BoundaryData::homogeneous(), rs);
    CHECK(t.records.back().time == doctest::Approx(0.05));
    const std::size_t steps = t.records.back().step;
    CHECK(t.records.size() == 1 + steps / 7 + (steps % 7 ? 1 : 0));
    CHECK(snaps == static_cast<int>(1 + steps / 10));
    for (const auto& r : t.records) CHECK(r.energy.total == 0.0);

    SimulationState bad(g);
    bad.u(0, 0) = 1.0;
    CHECK_THROWS_AS(run_simulation(bad, kReferenceParameters, {}, BoundaryData::homogeneous(), rs), IncompatibleData);
}

TEST_CASE("check_compatibility examples") {
    const auto g = CartesianGrid::unit_cube(5);
    const auto bc = BoundaryData::homogeneous();
    VectorField u0(g), u1(g);
    TensorField P0(g), P1(g);
    CHECK(check_compatibility(u0, u1, P0, P1, bc, 1e-12).ok());

    const NodeIndex corner{0, 2, 4};
    u0(1, g.index(corner)) = 1.0;
    auto r = check_compatibility(u0, u1, P0, P1, bc, 1e-8);
    CHECK_FALSE(r.ok());
    REQUIRE(r.violations().size() == 1);
    CHECK(r.violations()[0].name == "u0 = g");
    CHECK(r.violations()[0].worst_node == corner);
    CHECK(r.violations()[0].max_error == 1.0);

    u0.fill(0.0);
    // P_12 is tangential on the x-low face
    P0(1, g.index(0, 2, 2)) = 1e-9;
    CHECK(check_compatibility(u0, u1, P0, P1, bc, 1e-8).ok());
    r = check_compatibility(u0, u1, P0, P1, bc, 1e-10);
    CHECK_FALSE(r.ok());
    CHECK(r.violations()[0].name == "P0_i x n = G_i x n");
    // the normal component P_11 on the same face is free
    P0.fill(0.0);
    P0(0, g.index(0, 2, 2)) = 1.0;
    CHECK(check_compatibility(u0, u1, P0, P1, bc, 1e-10).ok());
}

TEST_CASE("inhomogeneous boundary data and rates") {
    const auto g = CartesianGrid::unit_cube(5);
    BoundaryData bc;
    bc.g = [](const NodeIndex&, const Point& x, double t) { return Vec3{x[0] * t * t, 0.0, 1.0}; };
    bc.G_ext = [](const NodeIndex&, const Point& x, double t) { return (x[1] + std::sin(t)) * Tensor3::identity(); };
    const NodeIndex n{4, 1, 2};
    CHECK(bc.displacement_rate(g, n, 0.5)[0] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(bc.extension_rate(g, n, 0.0)(1, 1) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK_FALSE(bc.is_homogeneous());
    bc.homogeneous_face[1] = true;  // x-high
    CHECK(bc.displacement(g, n, 0.5)[2] == 0.0);
    CHECK(bc.displacement(g, {0, 1, 2}, 0.5)[2] == 1.0);

    SimulationState s(g);
    Constraints(g).impose_values(s, bc, 0.0);
    Constraints(g).impose_rates(s, bc, 0.0);
    CHECK(check_compatibility(s.u, s.u_t, s.P, s.P_t, bc, 1e-7).ok());
    // P_11 on the x-low face is normal and left alone; P_22 there is tangential
    CHECK(s.P(0, g.index(0, 1, 2)) == 0.0);
    CHECK(s.P(4, g.index(0, 1, 2)) == doctest::Approx(0.25));
}
