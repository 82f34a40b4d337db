#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "relaxmm/energy.hpp"
#include "relaxmm/field.hpp"
#include "relaxmm/material.hpp"
#include "relaxmm/operators.hpp"

namespace relaxmm {

/// Dirichlet data for u and tangential data for the rows of P.
///
/// Empty callables mean zero data. When a rate callable is empty the rate is
/// taken by a centered time difference of the value callable with step
/// difference_step. A face flagged homogeneous forces zero data on every node
/// of that face, edges and corners included.
struct BoundaryData {
    using VectorFn = std::function<Vec3(const NodeIndex&, const Point&, double)>;
    using TensorFn = std::function<Tensor3(const NodeIndex&, const Point&, double)>;

    VectorFn g;
    VectorFn g_t;
    /// Volumetric extension whose tangential part is imposed on the rows of P.
    TensorFn G_ext;
    TensorFn G_ext_t;
    std::array<bool, 6> homogeneous_face{false, false, false, false, false, false};
    double difference_step = 1e-5;

    static BoundaryData homogeneous() {
        BoundaryData b;
        b.homogeneous_face.fill(true);
        return b;
    }

    bool is_homogeneous() const;

    Vec3 displacement(const CartesianGrid& grid, const NodeIndex& n, double t) const;
    Vec3 displacement_rate(const CartesianGrid& grid, const NodeIndex& n, double t) const;
    Tensor3 extension(const CartesianGrid& grid, const NodeIndex& n, double t) const;
    Tensor3 extension_rate(const CartesianGrid& grid, const NodeIndex& n, double t) const;
};

/// Body force f and body moment M. Each callable fills the whole field at time t;
/// empty callables mean zero.
struct SourceTerms {
    std::function<void(double, VectorField&)> f;
    std::function<void(double, TensorField&)> M;

    bool empty() const { return !f && !M; }
};

/// Degrees of freedom held by boundary data: every component of u on boundary
/// nodes, and P_ij on nodes lying on a face whose normal axis differs from j
/// (the tangential components of row i). Empty on periodic grids.
class Constraints {
public:
    Constraints() = default;
    explicit Constraints(const CartesianGrid& grid);

    const std::vector<std::size_t>& u_nodes() const { return u_nodes_; }
    /// Nodes where column j of P is pinned.
    const std::vector<std::size_t>& P_nodes(int column) const { return P_nodes_[static_cast<std::size_t>(column)]; }

    void impose_values(SimulationState& s, const BoundaryData& bc, double t) const;
    void impose_rates(SimulationState& s, const BoundaryData& bc, double t) const;

    /// Zeroes the constrained entries.
    void clear(VectorField& u) const;
    void clear(TensorField& P) const;

private:
    CartesianGrid grid_;
    std::vector<std::size_t> u_nodes_;
    std::array<std::vector<std::size_t>, 3> P_nodes_;
};

struct Acceleration {
    VectorField a_u;
    TensorField a_P;
};

/// Accelerations of the equations of motion:
///   a_u = Div sigma(grad u - P) + f
///   a_P = sigma(grad u - P) - micro_stress(P) - mu_micro L_c^2 Curl Curl P + M
void rhs(const SimulationState& state, const MaterialParameters& p, const SourceTerms& src, double t,
         Acceleration& out, Closure closure = Closure::summation_by_parts);
Acceleration rhs(const SimulationState& state, const MaterialParameters& p, const SourceTerms& src, double t,
                 Closure closure = Closure::summation_by_parts);

/// Largest omega^2 of the plane-wave matrix over the grid's Nyquist wavevectors.
double nyquist_omega_squared(const MaterialParameters& p, const CartesianGrid& grid);

/// dt = safety * min(h_min, 2) / omega_max with omega_max from nyquist_omega_squared.
/// The min keeps dt * omega_max <= 2 on coarse grids.
double cfl_timestep(const MaterialParameters& p, const CartesianGrid& grid, double safety);

class NumericalInstability : public std::runtime_error {
public:
    NumericalInstability(std::size_t step, double time, double dt);
    std::size_t step() const { return step_; }
    double time() const { return time_; }

private:
    std::size_t step_;
    double time_;
};

/// Kick-drift-kick leapfrog. The acceleration at the current time is cached, so
/// each step costs one rhs evaluation.
class LeapfrogIntegrator {
public:
    LeapfrogIntegrator(MaterialParameters p, SourceTerms src, BoundaryData bc, double dt,
                       Closure closure = Closure::summation_by_parts);

    /// Imposes boundary values and rates at s.time and evaluates the acceleration.
    void initialize(SimulationState& s);
    /// Advances s by dt. Throws NumericalInstability on non-finite values.
    void step(SimulationState& s);

    double dt() const { return dt_; }
    std::size_t steps_taken() const { return steps_; }
    const Acceleration& acceleration() const { return acc_; }

private:
    MaterialParameters p_;
    SourceTerms src_;
    BoundaryData bc_;
    double dt_;
    Closure closure_;
    Constraints constraints_;
    Acceleration acc_;
    bool ready_ = false;
    std::size_t steps_ = 0;
};

/// One leapfrog step from a fresh state (two rhs evaluations).
SimulationState step_leapfrog(const SimulationState& state, const MaterialParameters& p, const SourceTerms& src,
                              const BoundaryData& bc, double dt, Closure closure = Closure::summation_by_parts);

struct ConditionCheck {
    std::string name;
    double max_error = 0.0;
    NodeIndex worst_node;
    bool passed = true;
};

struct CompatibilityReport {
    std::vector<ConditionCheck> checks;  // u0 = g, u1 = g_t, P0 x n = G x n, P1 x n = G_t x n
    bool ok() const;
    std::vector<ConditionCheck> violations() const;
    std::string summary() const;
};

/// Compares initial data with the boundary data at t = 0 on every boundary node.
CompatibilityReport check_compatibility(const VectorField& u0, const VectorField& u1, const TensorField& P0,
                                        const TensorField& P1, const BoundaryData& bc, double tol);

class IncompatibleData : public std::invalid_argument {
public:
    explicit IncompatibleData(CompatibilityReport report);
    const CompatibilityReport& report() const { return report_; }

private:
    CompatibilityReport report_;
};

struct TrajectoryRecord {
    std::size_t step = 0;
    double time = 0.0;
    EnergyBreakdown energy;
    double power = 0.0;  // integral of <u_t, f> + <P_t, M>
};

struct Trajectory {
    double dt = 0.0;
    std::vector<TrajectoryRecord> records;
    std::vector<SimulationState> states;  // filled when RunSettings::keep_states
};

struct RunSettings {
    double T = 0.0;
    double cfl_safety = 0.5;
    /// Fixed time step; otherwise cfl_timestep(cfl_safety) shortened so that T is hit exactly.
    std::optional<double> dt;
    /// Fixed number of steps; overrides T (final time = steps * dt).
    std::optional<std::size_t> steps;
    std::size_t record_every = 1;
    std::size_t snapshot_every = 0;  // 0: no snapshots
    bool keep_states = false;
    double compatibility_tol = 1e-8;
    Closure closure = Closure::summation_by_parts;
    std::function<void(const SimulationState&, std::size_t)> on_record;
    std::function<void(const SimulationState&, std::size_t)> on_snapshot;
};

/// Runs leapfrog from initial to the final time, recording the energy every
/// record_every steps and at the final step.
Trajectory run_simulation(const SimulationState& initial, const MaterialParameters& p, const SourceTerms& src,
                          const BoundaryData& bc, const RunSettings& settings);

/// integral of <u_t, f(t)> + <P_t, M(t)> over the grid.
double source_power(const SimulationState& s, const SourceTerms& src);

}  // namespace relaxmm
