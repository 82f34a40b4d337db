#pragma once

#include <optional>
#include <vector>

#include "relaxmm/dynamics.hpp"
#include "relaxmm/energy.hpp"
#include "relaxmm/quadrature.hpp"

namespace relaxmm {

struct Box {
    Point lo{};
    Point hi{};

    bool contains(const Point& x) const {
        for (std::size_t a = 0; a < 3; ++a)
            if (x[a] < lo[a] || x[a] > hi[a]) return false;
        return true;
    }
    double volume() const { return (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]); }
};

/// Nested boxes V inside U inside the grid's domain.
struct CutoffSpec {
    Box inner;  // V
    Box outer;  // U

    /// Centered boxes with the given fractions of the domain edge lengths.
    static CutoffSpec centered(const CartesianGrid& g, double inner_fraction, double outer_fraction);

    /// Smallest gap between the faces of V and U.
    double inner_margin() const;
    /// Gap between U and the domain faces along axis, in direction sign (+1 or -1).
    double outer_clearance(const CartesianGrid& g, int axis, int sign) const;
    /// Gap between V and U along axis, in direction sign.
    double inner_clearance(int axis, int sign) const;

    /// Throws std::invalid_argument unless V is strictly inside U and U strictly inside the domain.
    void validate(const CartesianGrid& g) const;
};

/// Product over axes of quintic smoothstep ramps: 1 on V, 0 outside U. Requires
/// every V-to-U margin to span at least two grid spacings.
ScalarField cutoff_eta(const CartesianGrid& g, const CutoffSpec& spec);

/// Quintic smoothstep 6t^5 - 15t^4 + 10t^3 clamped to [0, 1]; slope at most 15/8.
double smoothstep5(double t);

/// Number of spacings m with h = m * spacing[axis]; throws when h is not a
/// nonzero lattice multiple.
int lattice_steps(const CartesianGrid& g, int axis, double h);

/// (phi(x + h e_axis) - phi(x)) / h at every node whose shifted node is in the
/// grid; 0 elsewhere.
template <std::size_t NC>
NodeField<NC> difference_quotient(const NodeField<NC>& phi, int axis, double h);

/// Same, after checking that shifts by h keep U inside the domain.
template <std::size_t NC>
NodeField<NC> difference_quotient(const NodeField<NC>& phi, int axis, double h, const CutoffSpec& spec);

/// Weighted energy of (eta D^h u, eta D^h u_t, eta D^h P, eta D^h P_t): the
/// difference quotients are taken first, then differentiated, and eta^2
/// multiplies every integrand.
EnergyBreakdown localized_energy(const SimulationState& state, const MaterialParameters& p, const CutoffSpec& spec,
                                 int axis, double h, Closure closure = Closure::summation_by_parts);
/// Same with a precomputed cutoff field.
EnergyBreakdown localized_energy(const SimulationState& state, const MaterialParameters& p, const ScalarField& eta,
                                 int axis, double h, Closure closure = Closure::summation_by_parts);

struct DifferenceQuotientCheck {
    double lhs = 0.0;  // ||D^h phi||_{L2(V)}
    double rhs = 0.0;  // ||grad phi||_{L2(U)}
    double ratio = 0.0;
    bool inconsistent = false;  // rhs == 0 while lhs > 0
};

/// Compares ||D^h phi|| on V with ||grad phi|| on U. Both boxes must be
/// node-aligned, and h must not exceed the V-to-U clearance in its direction.
/// Gradients use centered differences (U is interior, so the closure does not matter).
template <std::size_t NC>
DifferenceQuotientCheck dq_theorem_check(const NodeField<NC>& phi, const CutoffSpec& spec, int axis, double h);

/// Inclusive node range of an aligned box; throws if a face is not on a node plane.
NodeBox aligned_node_box(const CartesianGrid& g, const Box& b);

struct ProbeRow {
    int axis = 0;
    double h = 0.0;
    double sup_energy = 0.0;
    double sup_time = 0.0;
    EnergyBreakdown at_sup;  // breakdown at the time of the supremum
};

struct ProbeSummary {
    std::vector<ProbeRow> rows;
    std::vector<double> axis_ratio;  // per axis: max over h / min over h of sup_energy
    double worst_ratio = 0.0;
};

/// Streaming h-sweep: feed states in time order, read the table at the end.
class HSweepProbe {
public:
    HSweepProbe(const CartesianGrid& g, const MaterialParameters& p, const CutoffSpec& spec, std::vector<int> axes,
                std::vector<double> h_list, Closure closure = Closure::summation_by_parts);

    void observe(const SimulationState& s);
    ProbeSummary summary() const;
    std::size_t observations() const { return observed_; }

private:
    MaterialParameters p_;
    CutoffSpec spec_;
    ScalarField eta_;
    Closure closure_;
    std::vector<ProbeRow> rows_;
    std::size_t observed_ = 0;
};

/// h-sweep over the kept states of a trajectory.
ProbeSummary h_sweep_probe(const Trajectory& trajectory, const MaterialParameters& p, const CutoffSpec& spec,
                           const std::vector<int>& axes, const std::vector<double>& h_list);

}  // namespace relaxmm
