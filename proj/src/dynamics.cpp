#include "relaxmm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "relaxmm/dispersion.hpp"
#include "relaxmm/quadrature.hpp"

namespace relaxmm {

namespace {

bool touches_homogeneous(const BoundaryData& bc, const CartesianGrid& g, const NodeIndex& n) {
    const auto mask = g.face_mask(n);
    for (int f = 0; f < 6; ++f)
        if ((mask >> f) & 1u && bc.homogeneous_face[static_cast<std::size_t>(f)]) return true;
    return false;
}

// Columns j of P pinned at a node: those with the node on a face whose normal axis differs from j.
unsigned pinned_columns(std::uint8_t mask) {
    unsigned axes = 0;
    for (int f = 0; f < 6; ++f)
        if ((mask >> f) & 1u) axes |= 1u << (f / 2);
    unsigned cols = 0;
    for (int j = 0; j < 3; ++j)
        if (axes & ~(1u << j)) cols |= 1u << j;
    return cols;
}

}  // namespace

bool BoundaryData::is_homogeneous() const {
    if (!g && !G_ext) return true;
    return std::all_of(homogeneous_face.begin(), homogeneous_face.end(), [](bool b) { return b; });
}

Vec3 BoundaryData::displacement(const CartesianGrid& grid, const NodeIndex& n, double t) const {
    if (!g || touches_homogeneous(*this, grid, n)) return {0.0, 0.0, 0.0};
    return g(n, grid.position(n), t);
}

Vec3 BoundaryData::displacement_rate(const CartesianGrid& grid, const NodeIndex& n, double t) const {
    if (!g || touches_homogeneous(*this, grid, n)) return {0.0, 0.0, 0.0};
    const Point x = grid.position(n);
    if (g_t) return g_t(n, x, t);
    const double d = difference_step;
    const Vec3 a = g(n, x, t + d), b = g(n, x, t - d);
    return {(a[0] - b[0]) / (2 * d), (a[1] - b[1]) / (2 * d), (a[2] - b[2]) / (2 * d)};
}

Tensor3 BoundaryData::extension(const CartesianGrid& grid, const NodeIndex& n, double t) const {
    if (!G_ext || touches_homogeneous(*this, grid, n)) return Tensor3::zero();
    return G_ext(n, grid.position(n), t);
}

Tensor3 BoundaryData::extension_rate(const CartesianGrid& grid, const NodeIndex& n, double t) const {
    if (!G_ext || touches_homogeneous(*this, grid, n)) return Tensor3::zero();
    const Point x = grid.position(n);
    if (G_ext_t) return G_ext_t(n, x, t);
    const double d = difference_step;
    return (1.0 / (2 * d)) * (G_ext(n, x, t + d) - G_ext(n, x, t - d));
}

Constraints::Constraints(const CartesianGrid& grid) : grid_(grid) {
    if (grid.periodic()) return;
    for (std::size_t q = 0; q < grid.node_count(); ++q) {
        const auto mask = grid.face_mask(grid.node(q));
        if (!mask) continue;
        u_nodes_.push_back(q);
        const unsigned cols = pinned_columns(mask);
        for (int j = 0; j < 3; ++j)
            if (cols & (1u << j)) P_nodes_[static_cast<std::size_t>(j)].push_back(q);
    }
}

void Constraints::impose_values(SimulationState& s, const BoundaryData& bc, double t) const {
    const auto& g = s.grid();
    const bool extension = static_cast<bool>(bc.G_ext);
    for (std::size_t q : u_nodes_) {
        const NodeIndex n = g.node(q);
        set_vec(s.u, q, bc.displacement(g, n, t));
        const unsigned cols = pinned_columns(g.face_mask(n));
        const Tensor3 G = extension ? bc.extension(g, n, t) : Tensor3::zero();
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (cols & (1u << j)) s.P(static_cast<std::size_t>(3 * i + j), q) = G(i, j);
    }
}

void Constraints::impose_rates(SimulationState& s, const BoundaryData& bc, double t) const {
    const auto& g = s.grid();
    const bool extension = static_cast<bool>(bc.G_ext);
    for (std::size_t q : u_nodes_) {
        const NodeIndex n = g.node(q);
        set_vec(s.u_t, q, bc.displacement_rate(g, n, t));
        const unsigned cols = pinned_columns(g.face_mask(n));
        const Tensor3 G = extension ? bc.extension_rate(g, n, t) : Tensor3::zero();
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (cols & (1u << j)) s.P_t(static_cast<std::size_t>(3 * i + j), q) = G(i, j);
    }
}

void Constraints::clear(VectorField& u) const {
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t q : u_nodes_) u(c, q) = 0.0;
}

void Constraints::clear(TensorField& P) const {
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t q : P_nodes_[j])
            for (std::size_t i = 0; i < 3; ++i) P(3 * i + j, q) = 0.0;
}

void rhs(const SimulationState& state, const MaterialParameters& p, const SourceTerms& src, double t,
         Acceleration& out, Closure closure) {
    state.check_consistent();
    const auto& g = state.grid();
    if (!(out.a_u.grid() == g)) out.a_u = VectorField(g);
    if (!(out.a_P.grid() == g)) out.a_P = TensorField(g);

    TensorField sigma = gradient(state.u, closure);
    const std::size_t n = g.node_count();
    for (std::size_t q = 0; q < n; ++q) {
        const Tensor3 P = get_tensor(state.P, q);
        const Tensor3 s = cauchy_stress(p, get_tensor(sigma, q) - P);
        set_tensor(sigma, q, s);
        set_tensor(out.a_P, q, s - micro_stress(p, P));
    }
    div_tensor(sigma, out.a_u, closure);

    const TensorField curl = curl_tensor(state.P, closure);
    curl_tensor(curl, out.a_P, closure, -p.curvature_modulus(), true);

    if (src.f) {
        VectorField f(g);
        src.f(t, f);
        out.a_u += f;
    }
    if (src.M) {
        TensorField M(g);
        src.M(t, M);
        out.a_P += M;
    }
}

Acceleration rhs(const SimulationState& state, const MaterialParameters& p, const SourceTerms& src, double t,
                 Closure closure) {
    Acceleration a{VectorField(state.grid()), TensorField(state.grid())};
    rhs(state, p, src, t, a, closure);
    return a;
}

double nyquist_omega_squared(const MaterialParameters& p, const CartesianGrid& grid) {
    double best = 0.0;
    for (int s = 1; s < 8; ++s) {
        Vec3 k{};
        for (int a = 0; a < 3; ++a)
            if (s & (1 << a))
                k[static_cast<std::size_t>(a)] = std::numbers::pi / grid.spacing()[static_cast<std::size_t>(a)];
        const auto ev = plane_wave_eigenvalues(assemble_plane_wave_matrix(p, k));
        best = std::max(best, ev.back());
    }
    return best;
}

double cfl_timestep(const MaterialParameters& p, const CartesianGrid& grid, double safety) {
    if (!(safety > 0.0 && safety <= 1.0)) throw std::invalid_argument("cfl_timestep: safety must lie in (0, 1]");
    require_valid(p);
    const double omega = std::sqrt(nyquist_omega_squared(p, grid));
    return safety * std::min(grid.h_min(), 2.0) / omega;
}

namespace {
std::string instability_message(std::size_t step, double time, double dt) {
    std::ostringstream os;
    os << "non-finite state at step " << step << " (t = " << time << ", dt = " << dt
       << "); the time step is likely above the stability limit";
    return os.str();
}
}  // namespace

NumericalInstability::NumericalInstability(std::size_t step, double time, double dt)
    : std::runtime_error(instability_message(step, time, dt)), step_(step), time_(time) {}

LeapfrogIntegrator::LeapfrogIntegrator(MaterialParameters p, SourceTerms src, BoundaryData bc, double dt,
                                       Closure closure)
    : p_(p), src_(std::move(src)), bc_(std::move(bc)), dt_(dt), closure_(closure) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("leapfrog: dt must be positive");
    require_valid(p_);
}

void LeapfrogIntegrator::initialize(SimulationState& s) {
    s.check_consistent();
    constraints_ = Constraints(s.grid());
    constraints_.impose_values(s, bc_, s.time);
    constraints_.impose_rates(s, bc_, s.time);
    rhs(s, p_, src_, s.time, acc_, closure_);
    ready_ = true;
}

void LeapfrogIntegrator::step(SimulationState& s) {
    if (!ready_ || !(s.grid() == acc_.a_u.grid())) initialize(s);
    const double half = 0.5 * dt_;
    s.u_t.axpy(half, acc_.a_u);
    s.P_t.axpy(half, acc_.a_P);
    s.u.axpy(dt_, s.u_t);
    s.P.axpy(dt_, s.P_t);
    s.time += dt_;
    ++steps_;
    constraints_.impose_values(s, bc_, s.time);
    rhs(s, p_, src_, s.time, acc_, closure_);

    double sum = 0.0;
    for (double v : acc_.a_u.raw()) sum += v;
    for (double v : acc_.a_P.raw()) sum += v;
    if (!std::isfinite(sum)) throw NumericalInstability(steps_, s.time, dt_);

    s.u_t.axpy(half, acc_.a_u);
    s.P_t.axpy(half, acc_.a_P);
    constraints_.impose_rates(s, bc_, s.time);
}

SimulationState step_leapfrog(const SimulationState& state, const MaterialParameters& p, const SourceTerms& src,
                              const BoundaryData& bc, double dt, Closure closure) {
    SimulationState s = state;
    LeapfrogIntegrator integrator(p, src, bc, dt, closure);
    integrator.initialize(s);
    integrator.step(s);
    return s;
}

bool CompatibilityReport::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const ConditionCheck& c) { return c.passed; });
}

std::vector<ConditionCheck> CompatibilityReport::violations() const {
    std::vector<ConditionCheck> v;
    for (const auto& c : checks)
        if (!c.passed) v.push_back(c);
    return v;
}

std::string CompatibilityReport::summary() const {
    std::ostringstream os;
    for (const auto& c : checks) {
        os << c.name << ": " << (c.passed ? "ok" : "FAILED") << " (max error " << c.max_error << " at node ("
           << c.worst_node.i << ", " << c.worst_node.j << ", " << c.worst_node.k << "))\n";
    }
    return os.str();
}

CompatibilityReport check_compatibility(const VectorField& u0, const VectorField& u1, const TensorField& P0,
                                        const TensorField& P1, const BoundaryData& bc, double tol) {
    u0.check_same(u1);
    P0.check_same(P1);
    u0.check_same_grid(P0);
    const auto& g = u0.grid();
    CompatibilityReport r;
    r.checks = {{"u0 = g", 0.0, {}, true},
                {"u1 = g_t", 0.0, {}, true},
                {"P0_i x n = G_i x n", 0.0, {}, true},
                {"P1_i x n = G_t,i x n", 0.0, {}, true}};
    if (g.periodic()) return r;

    auto note = [](ConditionCheck& c, double err, const NodeIndex& n) {
        if (err > c.max_error) {
            c.max_error = err;
            c.worst_node = n;
        }
    };
    auto tangential_error = [](const Tensor3& P, const Tensor3& G, std::uint8_t mask) {
        double e = 0.0;
        for (int f = 0; f < 6; ++f) {
            if (!((mask >> f) & 1u)) continue;
            const Vec3 nrm = face_normal(f);
            for (int i = 0; i < 3; ++i) {
                const Vec3 d = cross(row(P - G, i), nrm);
                for (double v : d) e = std::max(e, std::abs(v));
            }
        }
        return e;
    };
    for (std::size_t q = 0; q < g.node_count(); ++q) {
        const NodeIndex n = g.node(q);
        const auto mask = g.face_mask(n);
        if (!mask) continue;
        const Vec3 gv = bc.displacement(g, n, 0.0);
        const Vec3 gr = bc.displacement_rate(g, n, 0.0);
        double e0 = 0.0, e1 = 0.0;
        for (std::size_t c = 0; c < 3; ++c) {
            e0 = std::max(e0, std::abs(u0(c, q) - gv[c]));
            e1 = std::max(e1, std::abs(u1(c, q) - gr[c]));
        }
        note(r.checks[0], e0, n);
        note(r.checks[1], e1, n);
        note(r.checks[2], tangential_error(get_tensor(P0, q), bc.extension(g, n, 0.0), mask), n);
        note(r.checks[3], tangential_error(get_tensor(P1, q), bc.extension_rate(g, n, 0.0), mask), n);
    }
    for (auto& c : r.checks) c.passed = c.max_error <= tol;
    return r;
}

IncompatibleData::IncompatibleData(CompatibilityReport report)
    : std::invalid_argument("initial data incompatible with boundary data:\n" + report.summary()),
      report_(std::move(report)) {}

double source_power(const SimulationState& s, const SourceTerms& src) {
    const auto& g = s.grid();
    ScalarField dens(g);
    if (src.f) {
        VectorField f(g);
        src.f(s.time, f);
        for (std::size_t c = 0; c < 3; ++c)
            for (std::size_t q = 0; q < g.node_count(); ++q) dens(0, q) += s.u_t(c, q) * f(c, q);
    }
    if (src.M) {
        TensorField M(g);
        src.M(s.time, M);
        for (std::size_t c = 0; c < 9; ++c)
            for (std::size_t q = 0; q < g.node_count(); ++q) dens(0, q) += s.P_t(c, q) * M(c, q);
    }
    return integrate_scalar(dens);
}

Trajectory run_simulation(const SimulationState& initial, const MaterialParameters& p, const SourceTerms& src,
                          const BoundaryData& bc, const RunSettings& settings) {
    require_valid(p);
    initial.check_consistent();
    const auto& g = initial.grid();
    if (settings.record_every == 0) throw std::invalid_argument("run_simulation: record_every must be >= 1");
    if (!(settings.T >= 0.0)) throw std::invalid_argument("run_simulation: T must be >= 0");

    if (!g.periodic()) {
        auto report = check_compatibility(initial.u, initial.u_t, initial.P, initial.P_t, bc, settings.compatibility_tol);
        if (!report.ok()) throw IncompatibleData(std::move(report));
    }

    double dt = settings.dt ? *settings.dt : cfl_timestep(p, g, settings.cfl_safety);
    std::size_t steps = 0;
    if (settings.steps) {
        steps = *settings.steps;
    } else if (settings.T > 0.0) {
        steps = static_cast<std::size_t>(std::ceil(settings.T / dt - 1e-9));
        dt = settings.T / static_cast<double>(steps);
    }

    Trajectory traj;
    traj.dt = dt;
    SimulationState s = initial;
    LeapfrogIntegrator integrator(p, src, bc, dt, settings.closure);
    integrator.initialize(s);

    auto record = [&](std::size_t step) {
        traj.records.push_back({step, s.time, total_energy(s, p, nullptr, settings.closure), source_power(s, src)});
        if (settings.keep_states) traj.states.push_back(s);
        if (settings.on_record) settings.on_record(s, step);
    };
    auto snapshot = [&](std::size_t step) {
        if (settings.snapshot_every && settings.on_snapshot && step % settings.snapshot_every == 0)
            settings.on_snapshot(s, step);
    };

    record(0);
    snapshot(0);
    for (std::size_t n = 1; n <= steps; ++n) {
        integrator.step(s);
        if (n % settings.record_every == 0 || n == steps) record(n);
        snapshot(n);
    }
    return traj;
}

}  // namespace relaxmm
