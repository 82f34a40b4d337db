#include "relaxmm/operators.hpp"

#include <array>
#include <stdexcept>

namespace relaxmm {

const char* to_string(Closure c) {
    return c == Closure::one_sided ? "one_sided" : "summation_by_parts";
}

namespace {

struct Stencil {
    std::array<std::ptrdiff_t, 3> offset{};  // in units of nodes along the axis
    std::array<double, 3> weight{};
    int terms = 0;
};

// Row p of the 1-D difference matrix on n nodes with spacing h.
Stencil stencil_row(int p, int n, double h, bool periodic, Closure closure) {
    Stencil s;
    const double c = 1.0 / (2.0 * h);
    if (p > 0 && p < n - 1) {
        s.offset = {1, -1, 0};
        s.weight = {c, -c, 0.0};
        s.terms = 2;
        return s;
    }
    if (periodic) {
        const std::ptrdiff_t up = (p + 1) % n - p;
        const std::ptrdiff_t down = (p - 1 + n) % n - p;
        s.offset = {up, down, 0};
        s.weight = {c, -c, 0.0};
        s.terms = 2;
        return s;
    }
    const double sign = (p == 0) ? 1.0 : -1.0;  // mirror for the high end
    const std::ptrdiff_t dir = (p == 0) ? 1 : -1;
    if (closure == Closure::one_sided) {
        s.offset = {0, dir, 2 * dir};
        s.weight = {-3.0 * sign * c, 4.0 * sign * c, -1.0 * sign * c};
        s.terms = 3;
    } else {
        s.offset = {0, dir, 0};
        s.weight = {-sign / h, sign / h, 0.0};
        s.terms = 2;
    }
    return s;
}

void check_axis(int axis) {
    if (axis < 0 || axis > 2) throw std::invalid_argument("axis must be 0, 1 or 2");
}

template <bool Transpose>
void derivative_impl(std::span<const double> in, std::span<double> out, const CartesianGrid& g, int axis,
                     Closure closure, double scale, bool accumulate) {
    check_axis(axis);
    const auto& cnt = g.counts();
    const int nx = cnt[0], ny = cnt[1], nz = cnt[2];
    const int n = cnt[static_cast<std::size_t>(axis)];
    const double h = g.spacing()[static_cast<std::size_t>(axis)];
    const std::ptrdiff_t stride = g.stride(axis);
    const bool periodic = g.periodic();
    if (in.size() != g.node_count() || out.size() != g.node_count())
        throw std::invalid_argument("derivative: array size does not match grid");
    if (!accumulate) std::fill(out.begin(), out.end(), 0.0);

    const double* src = in.data();
    double* dst = out.data();

    auto apply_row = [&](std::size_t base, int i_lo, int i_hi, const Stencil& st) {
        // nodes base + i for i in [i_lo, i_hi), all sharing stencil st
        for (int t = 0; t < st.terms; ++t) {
            const std::ptrdiff_t off = st.offset[static_cast<std::size_t>(t)] * stride;
            const double w = scale * st.weight[static_cast<std::size_t>(t)];
            if constexpr (Transpose) {
                for (int i = i_lo; i < i_hi; ++i) dst[static_cast<std::ptrdiff_t>(base) + i + off] += w * src[base + static_cast<std::size_t>(i)];
            } else {
                for (int i = i_lo; i < i_hi; ++i) dst[base + static_cast<std::size_t>(i)] += w * src[static_cast<std::ptrdiff_t>(base) + i + off];
            }
        }
    };

    if (axis == 0) {
        const Stencil centered = stencil_row(1, n, h, periodic, closure);
        const Stencil first = stencil_row(0, n, h, periodic, closure);
        const Stencil last = stencil_row(n - 1, n, h, periodic, closure);
        for (int k = 0; k < nz; ++k) {
            for (int j = 0; j < ny; ++j) {
                const std::size_t base = g.index(0, j, k);
                apply_row(base, 1, nx - 1, centered);
                apply_row(base, 0, 1, first);
                apply_row(base, nx - 1, nx, last);
            }
        }
    } else {
        for (int k = 0; k < nz; ++k) {
            for (int j = 0; j < ny; ++j) {
                const int p = (axis == 1) ? j : k;
                const Stencil st = stencil_row(p, n, h, periodic, closure);
                apply_row(g.index(0, j, k), 0, nx, st);
            }
        }
    }
}

}  // namespace

void apply_derivative(std::span<const double> in, std::span<double> out, const CartesianGrid& g, int axis,
                      Closure closure, double scale, bool accumulate) {
    derivative_impl<false>(in, out, g, axis, closure, scale, accumulate);
}

void apply_derivative_transpose(std::span<const double> in, std::span<double> out, const CartesianGrid& g, int axis,
                                Closure closure, double scale, bool accumulate) {
    derivative_impl<true>(in, out, g, axis, closure, scale, accumulate);
}

ScalarField axis_derivative(const ScalarField& f, int axis, Closure closure) {
    ScalarField out(f.grid());
    apply_derivative(f.comp(0), out.comp(0), f.grid(), axis, closure);
    return out;
}

void gradient(const VectorField& u, TensorField& out, Closure closure) {
    u.check_same_grid(out);
    for (std::size_t i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) apply_derivative(u.comp(i), out.comp(3 * i + static_cast<std::size_t>(j)), u.grid(), j, closure);
}

TensorField gradient(const VectorField& u, Closure closure) {
    TensorField out(u.grid());
    gradient(u, out, closure);
    return out;
}

namespace {
// (curl v)_a = d_b v_c - d_c v_b for (a, b, c) cyclic.
constexpr int kCyc[3][2] = {{1, 2}, {2, 0}, {0, 1}};
}  // namespace

void curl_tensor(const TensorField& P, TensorField& out, Closure closure, double scale, bool accumulate) {
    P.check_same(out);
    const auto& g = P.grid();
    if (!accumulate) out.fill(0.0);
    for (std::size_t i = 0; i < 3; ++i) {
        for (int a = 0; a < 3; ++a) {
            const int b = kCyc[a][0], c = kCyc[a][1];
            auto dst = out.comp(3 * i + static_cast<std::size_t>(a));
            apply_derivative(P.comp(3 * i + static_cast<std::size_t>(c)), dst, g, b, closure, scale, true);
            apply_derivative(P.comp(3 * i + static_cast<std::size_t>(b)), dst, g, c, closure, -scale, true);
        }
    }
}

TensorField curl_tensor(const TensorField& P, Closure closure) {
    TensorField out(P.grid());
    curl_tensor(P, out, closure);
    return out;
}

void div_tensor(const TensorField& S, VectorField& out, Closure closure, double scale, bool accumulate) {
    S.check_same_grid(out);
    if (!accumulate) out.fill(0.0);
    for (std::size_t i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            apply_derivative(S.comp(3 * i + static_cast<std::size_t>(j)), out.comp(i), S.grid(), j, closure, scale, true);
}

VectorField div_tensor(const TensorField& S, Closure closure) {
    VectorField out(S.grid());
    div_tensor(S, out, closure);
    return out;
}

VectorField curl_vector(const VectorField& v, Closure closure) {
    VectorField out(v.grid());
    for (int a = 0; a < 3; ++a) {
        const int b = kCyc[a][0], c = kCyc[a][1];
        auto dst = out.comp(static_cast<std::size_t>(a));
        apply_derivative(v.comp(static_cast<std::size_t>(c)), dst, v.grid(), b, closure, 1.0, true);
        apply_derivative(v.comp(static_cast<std::size_t>(b)), dst, v.grid(), c, closure, -1.0, true);
    }
    return out;
}

ScalarField div_vector(const VectorField& v, Closure closure) {
    ScalarField out(v.grid());
    for (int j = 0; j < 3; ++j) apply_derivative(v.comp(static_cast<std::size_t>(j)), out.comp(0), v.grid(), j, closure, 1.0, true);
    return out;
}

VectorField gradient_transpose(const TensorField& T, Closure closure) {
    VectorField out(T.grid());
    for (std::size_t i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            apply_derivative_transpose(T.comp(3 * i + static_cast<std::size_t>(j)), out.comp(i), T.grid(), j, closure, 1.0, true);
    return out;
}

TensorField curl_tensor_transpose(const TensorField& C, Closure closure) {
    TensorField out(C.grid());
    for (std::size_t i = 0; i < 3; ++i) {
        for (int a = 0; a < 3; ++a) {
            const int b = kCyc[a][0], c = kCyc[a][1];
            const auto src = C.comp(3 * i + static_cast<std::size_t>(a));
            apply_derivative_transpose(src, out.comp(3 * i + static_cast<std::size_t>(c)), C.grid(), b, closure, 1.0, true);
            apply_derivative_transpose(src, out.comp(3 * i + static_cast<std::size_t>(b)), C.grid(), c, closure, -1.0, true);
        }
    }
    return out;
}

VectorField curl_vector_transpose(const VectorField& w, Closure closure) {
    VectorField out(w.grid());
    for (int a = 0; a < 3; ++a) {
        const int b = kCyc[a][0], c = kCyc[a][1];
        const auto src = w.comp(static_cast<std::size_t>(a));
        apply_derivative_transpose(src, out.comp(static_cast<std::size_t>(c)), w.grid(), b, closure, 1.0, true);
        apply_derivative_transpose(src, out.comp(static_cast<std::size_t>(b)), w.grid(), c, closure, -1.0, true);
    }
    return out;
}

VectorField div_vector_transpose(const ScalarField& s, Closure closure) {
    VectorField out(s.grid());
    for (int j = 0; j < 3; ++j)
        apply_derivative_transpose(s.comp(0), out.comp(static_cast<std::size_t>(j)), s.grid(), j, closure, 1.0, true);
    return out;
}

}  // namespace relaxmm
