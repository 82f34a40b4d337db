#pragma once

#include <vector>

#include "relaxmm/field.hpp"
#include "relaxmm/material.hpp"
#include "relaxmm/operators.hpp"

namespace relaxmm {

struct Trajectory;
struct SourceTerms;

/// Parts of the total energy. Each part is nonnegative for admissible parameters:
/// the Lame terms are regrouped into deviatoric and trace parts.
struct EnergyBreakdown {
    double kinetic_u = 0.0;      // 1/2 |u_t|^2
    double kinetic_P = 0.0;      // 1/2 |P_t|^2
    double elastic_sym = 0.0;    // mu_e |dev sym E|^2, E = grad u - P
    double elastic_trace = 0.0;  // (2 mu_e + 3 lambda_e)/6 tr(E)^2
    double elastic_skew = 0.0;   // mu_c |skew E|^2
    double micro_sym = 0.0;      // mu_micro |dev sym P|^2
    double micro_trace = 0.0;    // (2 mu_micro + 3 lambda_micro)/6 tr(P)^2
    double curvature = 0.0;      // mu_micro L_c^2 / 2 |Curl P|^2
    double total = 0.0;

    double sum_of_parts() const {
        return kinetic_u + kinetic_P + elastic_sym + elastic_trace + elastic_skew + micro_sym + micro_trace +
               curvature;
    }
    double potential() const { return total - kinetic_u - kinetic_P; }
    EnergyBreakdown& operator*=(double s);
};

/// Total energy by trapezoidal quadrature. With a weight, weight^2 multiplies
/// every integrand (applied after differentiation).
EnergyBreakdown total_energy(const SimulationState& state, const MaterialParameters& p,
                             const ScalarField* weight = nullptr, Closure closure = Closure::summation_by_parts);

/// residual_n = E(t_{n+1}) - E(t_n) - trapezoidal time integral of the source
/// power between consecutive kept states. Requires trajectory states.
std::vector<double> energy_balance_residual(const Trajectory& trajectory, const SourceTerms& src);

}  // namespace relaxmm
