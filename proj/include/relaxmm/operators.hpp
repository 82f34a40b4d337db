#pragma once

#include <span>

#include "relaxmm/field.hpp"

namespace relaxmm {

/// Boundary rows of the per-axis difference operator. Interior rows are always
/// the centered (f[i+1] - f[i-1]) / 2h stencil; periodic grids wrap around and
/// ignore the closure.
enum class Closure {
    /// 3-point one-sided second-order rows, exact on quadratics.
    one_sided,
    /// (f[1] - f[0]) / h rows. Together with trapezoidal weights W this satisfies
    /// W D + D^T W = diag(-1, 0, ..., 0, 1), which the time-domain solver relies
    /// on for exact semi-discrete energy conservation.
    summation_by_parts,
};

const char* to_string(Closure c);

/// Low-level kernel: out (+)= scale * D_axis in, on raw component arrays.
void apply_derivative(std::span<const double> in, std::span<double> out, const CartesianGrid& g, int axis,
                      Closure closure, double scale = 1.0, bool accumulate = false);

/// Low-level kernel: out (+)= scale * D_axis^T in.
void apply_derivative_transpose(std::span<const double> in, std::span<double> out, const CartesianGrid& g, int axis,
                                Closure closure, double scale = 1.0, bool accumulate = false);

/// Partial derivative along axis (0, 1 or 2).
ScalarField axis_derivative(const ScalarField& f, int axis, Closure closure = Closure::one_sided);

/// (grad u)_{ij} = d_j u_i.
TensorField gradient(const VectorField& u, Closure closure = Closure::one_sided);
void gradient(const VectorField& u, TensorField& out, Closure closure);

/// Row-wise curl: row i of the result is curl of row i of P.
TensorField curl_tensor(const TensorField& P, Closure closure = Closure::one_sided);
void curl_tensor(const TensorField& P, TensorField& out, Closure closure, double scale = 1.0, bool accumulate = false);

/// Row-wise divergence: (Div S)_i = sum_j d_j S_ij.
VectorField div_tensor(const TensorField& S, Closure closure = Closure::one_sided);
void div_tensor(const TensorField& S, VectorField& out, Closure closure, double scale = 1.0, bool accumulate = false);

VectorField curl_vector(const VectorField& v, Closure closure = Closure::one_sided);
ScalarField div_vector(const VectorField& v, Closure closure = Closure::one_sided);

/// Discrete adjoints (plain Euclidean transposes) of the operators above.
VectorField gradient_transpose(const TensorField& T, Closure closure);
TensorField curl_tensor_transpose(const TensorField& C, Closure closure);
VectorField curl_vector_transpose(const VectorField& w, Closure closure);
VectorField div_vector_transpose(const ScalarField& s, Closure closure);

}  // namespace relaxmm
