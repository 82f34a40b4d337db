#include <cmath>
#include <random>

#include "doctest.h"
#include "relaxmm/dynamics.hpp"
#include "relaxmm/initial_data.hpp"
#include "relaxmm/operators.hpp"
#include "relaxmm/regularity.hpp"

using namespace relaxmm;

namespace {

const MaterialParameters kP{2.0, 1.0, 0.5, 1.5, 0.25, 0.7};

CutoffSpec quarter_spec(const CartesianGrid& g) { return CutoffSpec::centered(g, 0.25, 0.5); }

template <std::size_t NC>
NodeField<NC> random_field(const CartesianGrid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    NodeField<NC> f(g);
    for (auto& v : f.raw()) v = d(rng);
    return f;
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

TEST_CASE("cutoff is one on V, zero outside U, bounded slope") {
    const auto g = CartesianGrid::unit_cube(17);
    const auto spec = quarter_spec(g);
    const auto eta = cutoff_eta(g, spec);
    for (std::size_t q = 0; q < g.node_count(); ++q) {
        const Point x = g.position(q);
        CHECK(eta(0, q) >= 0.0);
        CHECK(eta(0, q) <= 1.0);
        if (spec.inner.contains(x)) CHECK(eta(0, q) == 1.0);
        if (!spec.outer.contains(x)) CHECK(eta(0, q) == 0.0);
    }
    const double bound = 2.0 * (15.0 / 8.0) / spec.inner_margin();
    double worst = 0.0;
    for (std::size_t q = 0; q < g.node_count(); ++q) {
        double s = 0.0;
        for (int a = 0; a < 3; ++a) {
            ScalarField d(g);
            apply_derivative(eta.comp(0), d.comp(0), g, a, Closure::one_sided);
            s += d(0, q) * d(0, q);
        }
        worst = std::max(worst, std::sqrt(s));
    }
    CHECK(worst > 0.0);
    CHECK(worst <= bound);
}

TEST_CASE("smoothstep endpoints and slope") {
    CHECK(smoothstep5(-1.0) == 0.0);
    CHECK(smoothstep5(0.0) == 0.0);
    CHECK(smoothstep5(0.5) == doctest::Approx(0.5));
    CHECK(smoothstep5(1.0) == 1.0);
    CHECK(smoothstep5(2.0) == 1.0);
    const double e = 1e-6;
    CHECK((smoothstep5(0.5 + e) - smoothstep5(0.5 - e)) / (2 * e) == doctest::Approx(15.0 / 8.0).epsilon(1e-8));
}

TEST_CASE("cutoff rejects thin margins and bad boxes") {
    const auto g = CartesianGrid::unit_cube(9);
    CHECK_THROWS_AS(cutoff_eta(g, CutoffSpec::centered(g, 0.4, 0.5)), std::invalid_argument);
    CHECK_THROWS_AS(cutoff_eta(g, CutoffSpec::centered(g, 0.6, 0.5)), std::invalid_argument);
    CHECK_THROWS_AS(cutoff_eta(g, CutoffSpec::centered(g, 0.25, 1.0)), std::invalid_argument);
    CHECK_NOTHROW(cutoff_eta(g, CutoffSpec::centered(g, 0.25, 0.75)));
}

TEST_CASE("difference quotient examples") {
    const auto g = CartesianGrid::unit_cube(9);
    const double sp = g.spacing()[1];
    for (int m : {1, 2, 3, -2}) {
        const double h = m * sp;
        const auto lin = sample_scalar(g, [](const Point& x) { return x[1]; });
        const auto con = sample_scalar(g, [](const Point&) { return 3.5; });
        const auto sq = sample_scalar(g, [](const Point& x) { return x[1] * x[1]; });
        const auto dl = difference_quotient(lin, 1, h);
        const auto dc = difference_quotient(con, 1, h);
        const auto ds = difference_quotient(sq, 1, h);
        for (std::size_t q = 0; q < g.node_count(); ++q) {
            const NodeIndex n = g.node(q);
            const bool defined = n.j + m >= 0 && n.j + m < 9;
            CHECK(dc(0, q) == 0.0);
            if (defined) {
                CHECK(dl(0, q) == doctest::Approx(1.0).epsilon(1e-12));
                CHECK(ds(0, q) == doctest::Approx(2.0 * g.position(q)[1] + h).epsilon(1e-12));
            } else {
                CHECK(dl(0, q) == 0.0);
                CHECK(ds(0, q) == 0.0);
            }
        }
    }
}

TEST_CASE("difference quotient rejects invalid h") {
    const auto g = CartesianGrid::unit_cube(17);
    const auto f = random_field<3>(g, 1);
    const double sp = g.spacing()[0];
    CHECK_THROWS_AS(difference_quotient(f, 0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(difference_quotient(f, 0, 1.5 * sp), std::invalid_argument);
    CHECK_THROWS_AS(difference_quotient(f, 3, sp), std::invalid_argument);
    const auto spec = quarter_spec(g);
    CHECK_NOTHROW(difference_quotient(f, 0, 4 * sp, spec));
    CHECK_NOTHROW(difference_quotient(f, 0, -4 * sp, spec));
    CHECK_THROWS_AS(difference_quotient(f, 0, 5 * sp, spec), std::invalid_argument);
    CHECK_THROWS_AS(difference_quotient(f, 2, -5 * sp, spec), std::invalid_argument);
}

TEST_CASE("difference quotient is linear and commutes with derivatives along other axes") {
    const auto g = CartesianGrid({1.0, 1.2, 0.9}, {11, 9, 8});
    const auto a = random_field<1>(g, 2), b = random_field<1>(g, 3);
    const double h = 2 * g.spacing()[0];
    const auto lhs = difference_quotient(ScalarField(2.0 * a + (-3.0) * b), 0, h);
    const auto rhs = 2.0 * difference_quotient(a, 0, h) + (-3.0) * difference_quotient(b, 0, h);
    CHECK(max_abs((lhs - rhs).raw()) <= 1e-12 * max_abs(lhs.raw()));

    for (Closure c : {Closure::one_sided, Closure::summation_by_parts}) {
        for (int axis : {1, 2}) {
            const auto dq_then_d = axis_derivative(difference_quotient(a, 0, h), axis, c);
            const auto d_then_dq = difference_quotient(axis_derivative(a, axis, c), 0, h);
            CHECK(max_abs((dq_then_d - d_then_dq).raw()) <= 1e-12 * max_abs(dq_then_d.raw()));
        }
    }
}

TEST_CASE("curl commutes with the difference quotient away from the shifted boundary layer") {
    const auto g = CartesianGrid::unit_cube(12);
    const auto P = random_field<9>(g, 4);
    for (int axis = 0; axis < 3; ++axis) {
        for (int m : {1, 3}) {
            const double h = m * g.spacing()[static_cast<std::size_t>(axis)];
            const auto a = curl_tensor(difference_quotient(P, axis, h));
            const auto b = difference_quotient(curl_tensor(P), axis, h);
            const double scale = max_abs(a.raw());
            double worst = 0.0;
            for (std::size_t q = 0; q < g.node_count(); ++q) {
                const int pos = g.node(q)[axis];
                if (pos < 1 || pos > 12 - 2 - m) continue;
                for (std::size_t c = 0; c < 9; ++c) worst = std::max(worst, std::abs(a(c, q) - b(c, q)));
            }
            CHECK(worst <= 1e-12 * scale);
        }
    }
}

TEST_CASE("localized energy: zero state and constant quotients") {
    const auto g = CartesianGrid::unit_cube(17);
    const auto spec = quarter_spec(g);
    const double h = 2 * g.spacing()[2];
    CHECK(localized_energy(SimulationState(g), kP, spec, 2, h).total == 0.0);

    // u_t = c x_k and P = x_k A give constant quotients c and A.
    const Vec3 c{0.3, -1.0, 0.7};
    Tensor3 A;
    for (std::size_t q = 0; q < 9; ++q) A.a[q] = 0.1 * static_cast<double>(q) - 0.35;
    SimulationState s(g);
    s.u_t = sample_vector(g, [&](const Point& x) { return Vec3{c[0] * x[2], c[1] * x[2], c[2] * x[2]}; });
    s.P = sample_tensor(g, [&](const Point& x) { return x[2] * A; });
    const auto e = localized_energy(s, kP, spec, 2, h);

    const auto eta = cutoff_eta(g, spec);
    ScalarField eta2(g);
    for (std::size_t q = 0; q < g.node_count(); ++q) eta2(0, q) = eta(0, q) * eta(0, q);
    const double w = integrate_scalar(eta2);
    const auto le = local_energy(kP, -1.0 * A, A);
    CHECK(e.kinetic_u == doctest::Approx(0.5 * dot(c, c) * w).epsilon(1e-12));
    CHECK(e.kinetic_P == doctest::Approx(0.0));
    CHECK(e.curvature == doctest::Approx(0.0));
    CHECK(e.elastic_sym == doctest::Approx(le.elastic_sym * w).epsilon(1e-12));
    CHECK(e.elastic_trace == doctest::Approx(le.elastic_trace * w).epsilon(1e-12));
    CHECK(e.elastic_skew == doctest::Approx(le.elastic_skew * w).epsilon(1e-12));
    CHECK(e.micro_sym == doctest::Approx(le.micro_sym * w).epsilon(1e-12));
    CHECK(e.micro_trace == doctest::Approx(le.micro_trace * w).epsilon(1e-12));
}

TEST_CASE("localized energy approaches the weighted energy of the differentiated state") {
    const auto g = CartesianGrid::unit_cube(33);
    const auto spec = quarter_spec(g);
    const double pi = M_PI;
    auto field = [&](const Point& x, double dx) {
        // value (dx = 0) or x-derivative (dx = 1) of a smooth state
        const double sx = std::sin(pi * x[0]), cx = std::cos(pi * x[0]);
        const double f = dx == 0.0 ? sx : pi * cx;
        return f * std::sin(pi * x[1]) * std::cos(0.5 * pi * x[2]);
    };
    SimulationState s(g), d(g);
    for (std::size_t q = 0; q < g.node_count(); ++q) {
        const Point x = g.position(q);
        const double v = field(x, 0.0), dv = field(x, 1.0);
        const double y = x[1];
        for (std::size_t c = 0; c < 3; ++c) {
            s.u(c, q) = (1.0 + static_cast<double>(c)) * v;
            d.u(c, q) = (1.0 + static_cast<double>(c)) * dv;
            s.u_t(c, q) = 0.5 * v * (y - 0.3 * static_cast<double>(c));
            d.u_t(c, q) = 0.5 * dv * (y - 0.3 * static_cast<double>(c));
        }
        for (std::size_t c = 0; c < 9; ++c) {
            s.P(c, q) = 0.2 * (static_cast<double>(c) - 4.0) * v;
            d.P(c, q) = 0.2 * (static_cast<double>(c) - 4.0) * dv;
            s.P_t(c, q) = 0.1 * v;
            d.P_t(c, q) = 0.1 * dv;
        }
    }
    const auto eta = cutoff_eta(g, spec);
    const double ref = total_energy(d, kP, &eta).total;
    double prev = INFINITY;
    for (int m : {4, 2, 1}) {
        const double err = std::abs(localized_energy(s, kP, spec, 0, m * g.spacing()[0]).total - ref);
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 0.05 * ref);
}

TEST_CASE("localized energy is quadratic in the state") {
    const auto g = CartesianGrid::unit_cube(17);
    const auto spec = quarter_spec(g);
    const auto s = random_band_limited_state(g, 3, 11);
    SimulationState s2 = s;
    const double alpha = -2.5;
    s2.u *= alpha;
    s2.u_t *= alpha;
    s2.P *= alpha;
    s2.P_t *= alpha;
    const double h = g.spacing()[1];
    const auto e = localized_energy(s, kP, spec, 1, h);
    const auto e2 = localized_energy(s2, kP, spec, 1, h);
    CHECK(e2.total == doctest::Approx(alpha * alpha * e.total).epsilon(1e-12));
    CHECK(e2.curvature == doctest::Approx(alpha * alpha * e.curvature).epsilon(1e-12));
    CHECK(e2.kinetic_P == doctest::Approx(alpha * alpha * e.kinetic_P).epsilon(1e-12));
}

TEST_CASE("difference-quotient check examples") {
    const auto g = CartesianGrid::unit_cube(33);
    CutoffSpec spec;
    spec.inner = {{0.375, 0.375, 0.375}, {0.625, 0.625, 0.625}};
    spec.outer = {{0.25, 0.25, 0.25}, {0.75, 0.75, 0.75}};
    const double sp = g.spacing()[0];

    const auto lin = sample_scalar(g, [](const Point& x) { return x[0]; });
    const auto r = dq_theorem_check(lin, spec, 0, 2 * sp);
    CHECK(r.ratio == doctest::Approx(std::sqrt(spec.inner.volume() / spec.outer.volume())).epsilon(1e-12));
    CHECK(r.ratio < 1.0);
    CHECK_FALSE(r.inconsistent);

    const auto con = sample_scalar(g, [](const Point&) { return 2.0; });
    const auto rc = dq_theorem_check(con, spec, 1, sp);
    CHECK(rc.lhs == 0.0);
    CHECK(rc.rhs == 0.0);
    CHECK_FALSE(rc.inconsistent);

    for (int axis = 0; axis < 3; ++axis) {
        const auto s = sample_scalar(g, [&](const Point& x) { return std::sin(M_PI * x[static_cast<std::size_t>(axis)]); });
        for (int m : {1, 2, 4, -4}) CHECK(dq_theorem_check(s, spec, axis, m * sp).ratio <= 1.05);
    }

    CHECK_THROWS_AS(dq_theorem_check(lin, spec, 0, 5 * sp), std::invalid_argument);
    CutoffSpec off = spec;
    off.inner.lo[0] += 0.3 * sp;
    CHECK_THROWS_AS(dq_theorem_check(lin, off, 0, sp), std::invalid_argument);
}

TEST_CASE("h-sweep on a zero trajectory reports zeros") {
    const auto g = CartesianGrid::unit_cube(17);
    const auto spec = quarter_spec(g);
    const double sp = g.spacing()[0];
    RunSettings rs;
    rs.T = 0.05;
    rs.keep_states = true;
    const auto traj = run_simulation(SimulationState(g), kReferenceParameters, {}, BoundaryData::homogeneous(), rs);
    const auto sum = h_sweep_probe(traj, kReferenceParameters, spec, {0, 1, 2}, {4 * sp, 2 * sp, sp});
    CHECK(sum.rows.size() == 9);
    for (const auto& row : sum.rows) CHECK(row.sup_energy == 0.0);
    for (double ratio : sum.axis_ratio) CHECK(ratio == 1.0);
    CHECK(sum.worst_ratio == 1.0);
}

TEST_CASE("streaming probe matches the trajectory probe") {
    const auto g = CartesianGrid::unit_cube(17);
    const auto spec = quarter_spec(g);
    const double sp = g.spacing()[0];
    const auto s0 = standing_wave_state(g, {1, 1, 1}, 1.0);
    HSweepProbe probe(g, kReferenceParameters, spec, {0, 2}, {2 * sp, sp});
    RunSettings rs;
    rs.steps = 20;
    rs.record_every = 5;
    rs.keep_states = true;
    rs.on_record = [&](const SimulationState& s, std::size_t) { probe.observe(s); };
    const auto traj = run_simulation(s0, kReferenceParameters, {}, BoundaryData::homogeneous(), rs);
    const auto a = probe.summary();
    const auto b = h_sweep_probe(traj, kReferenceParameters, spec, {0, 2}, {2 * sp, sp});
    CHECK(probe.observations() == traj.states.size());
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t r = 0; r < a.rows.size(); ++r) {
        CHECK(a.rows[r].sup_energy == b.rows[r].sup_energy);
        CHECK(a.rows[r].sup_time == b.rows[r].sup_time);
        CHECK(a.rows[r].sup_energy > 0.0);
    }
    CHECK(a.worst_ratio >= 1.0);

    CHECK_THROWS_AS(HSweepProbe(g, kReferenceParameters, spec, {0}, {5 * sp}), std::invalid_argument);
    CHECK_THROWS_AS(HSweepProbe(g, kReferenceParameters, spec, {0}, {0.5 * sp}), std::invalid_argument);
}
