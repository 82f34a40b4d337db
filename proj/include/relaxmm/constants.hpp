#pragma once

#include <cstdint>
#include <optional>

#include "relaxmm/field.hpp"
#include "relaxmm/material.hpp"
#include "relaxmm/operators.hpp"

namespace relaxmm {

struct ConstantOptions {
    std::size_t trials = 32;
    std::uint64_t seed = 0x5eed5eedULL;
    /// Eigen refinement (LOBPCG) from the best trials; by default only on
    /// grids with at most 9^3 nodes.
    std::optional<bool> refine;
    int block = 8;
    int max_iterations = 400;
    /// LOBPCG iterations per weight update of the Gaffney ascent (warm started).
    int sweep_iterations = 60;
    double tolerance = 1e-7;
    Closure closure = Closure::summation_by_parts;
};

struct ConstantEstimate {
    double value = 0.0;    // combined estimate reported as the constant
    double sampled = 0.0;  // best value over the random trials alone
    std::optional<double> refined;
    std::size_t trials = 0;
    int iterations = 0;
    bool converged = false;
    double residual = 0.0;
};

/// Discrete coercivity constant: the infimum over admissible (u, P) of
///   potential energy / (||grad u||^2 + ||P||^2 + ||Curl P||^2)
/// with u = 0 on boundary nodes and the tangential components of P zero there
/// (the nodes pinned by Constraints). Rates are zero. value = min(sampled, refined).
ConstantEstimate coercivity_constant(const CartesianGrid& grid, const MaterialParameters& p,
                                     const ConstantOptions& options = {});

/// Discrete Gaffney constant: the supremum over v with v_i = 0 on the faces
/// normal to axis i of ||grad v|| / (||curl v|| + ||div v|| + ||v||).
/// The refinement maximizes ||grad v||^2 / (|curl v|^2/w_c + |div v|^2/w_d + |v|^2/w_v)
/// over the weights w on the simplex, which reaches the squared sum form at its
/// maximum; every Ritz vector met on the way enters the sum-form maximum. The
/// equal-weight pencil gives quadratic_constant, the constant of
///   ||grad v||^2 <= C^2 (||curl v||^2 + ||div v||^2 + ||v||^2).
struct GaffneyEstimate : ConstantEstimate {
    std::optional<double> quadratic_constant;  // sqrt of the top eigenvalue
};
GaffneyEstimate gaffney_constant(const CartesianGrid& grid, const ConstantOptions& options = {});

/// Sum-form Gaffney quotient of one field (0 for the zero field).
double gaffney_quotient(const VectorField& v, Closure closure = Closure::summation_by_parts);

/// Coercivity quotient of one state (u, P); rates are ignored.
double coercivity_quotient(const VectorField& u, const TensorField& P, const MaterialParameters& p,
                           Closure closure = Closure::summation_by_parts);

/// Nodes where v_i is pinned for the Gaffney check: faces whose normal is axis i.
void clear_normal_components(VectorField& v);

}  // namespace relaxmm
