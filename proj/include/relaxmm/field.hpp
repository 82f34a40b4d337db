#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "relaxmm/grid.hpp"
#include "relaxmm/tensor.hpp"

namespace relaxmm {

/// NC real components sampled at every node of a CartesianGrid, stored
/// component-major so each component is a contiguous x-fastest array.
template <std::size_t NC>
class NodeField {
public:
    static constexpr std::size_t components = NC;

    NodeField() = default;
    explicit NodeField(const CartesianGrid& grid, double fill = 0.0)
        : grid_(grid), n_(grid.node_count()), data_(NC * grid.node_count(), fill) {}

    const CartesianGrid& grid() const { return grid_; }
    std::size_t nodes() const { return n_; }

    std::span<double> comp(std::size_t c) { return {data_.data() + c * n_, n_}; }
    std::span<const double> comp(std::size_t c) const { return {data_.data() + c * n_, n_}; }

    double& operator()(std::size_t c, std::size_t node) { return data_[c * n_ + node]; }
    double operator()(std::size_t c, std::size_t node) const { return data_[c * n_ + node]; }

    std::span<double> raw() { return data_; }
    std::span<const double> raw() const { return data_; }

    void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

    NodeField& operator+=(const NodeField& o) {
        check_same(o);
        for (std::size_t q = 0; q < data_.size(); ++q) data_[q] += o.data_[q];
        return *this;
    }
    NodeField& operator-=(const NodeField& o) {
        check_same(o);
        for (std::size_t q = 0; q < data_.size(); ++q) data_[q] -= o.data_[q];
        return *this;
    }
    NodeField& operator*=(double s) {
        for (auto& v : data_) v *= s;
        return *this;
    }
    /// this += s * o
    NodeField& axpy(double s, const NodeField& o) {
        check_same(o);
        for (std::size_t q = 0; q < data_.size(); ++q) data_[q] += s * o.data_[q];
        return *this;
    }

    friend NodeField operator+(NodeField a, const NodeField& b) { return a += b; }
    friend NodeField operator-(NodeField a, const NodeField& b) { return a -= b; }
    friend NodeField operator*(double s, NodeField a) { return a *= s; }

    void check_same(const NodeField& o) const {
        if (!(grid_ == o.grid_)) throw std::invalid_argument("fields live on different grids");
    }
    template <std::size_t M>
    void check_same_grid(const NodeField<M>& o) const {
        if (!(grid_ == o.grid())) throw std::invalid_argument("fields live on different grids");
    }

private:
    CartesianGrid grid_;
    std::size_t n_ = 0;
    std::vector<double> data_;
};

using ScalarField = NodeField<1>;
using VectorField = NodeField<3>;
using TensorField = NodeField<9>;

inline Vec3 get_vec(const VectorField& f, std::size_t node) { return {f(0, node), f(1, node), f(2, node)}; }
inline void set_vec(VectorField& f, std::size_t node, const Vec3& v) {
    for (std::size_t c = 0; c < 3; ++c) f(c, node) = v[c];
}
inline Tensor3 get_tensor(const TensorField& f, std::size_t node) {
    Tensor3 t;
    for (std::size_t c = 0; c < 9; ++c) t.a[c] = f(c, node);
    return t;
}
inline void set_tensor(TensorField& f, std::size_t node, const Tensor3& t) {
    for (std::size_t c = 0; c < 9; ++c) f(c, node) = t.a[c];
}

/// Samples a closed-form function at every node.
template <std::size_t NC, typename Fn>
NodeField<NC> sample(const CartesianGrid& grid, Fn&& fn) {
    NodeField<NC> f(grid);
    for (std::size_t n = 0; n < grid.node_count(); ++n) {
        const auto value = fn(grid.position(n));
        if constexpr (NC == 1) {
            f(0, n) = value;
        } else if constexpr (NC == 3) {
            set_vec(f, n, value);
        } else {
            set_tensor(f, n, value);
        }
    }
    return f;
}

inline ScalarField sample_scalar(const CartesianGrid& g, const std::function<double(const Point&)>& fn) {
    return sample<1>(g, fn);
}
inline VectorField sample_vector(const CartesianGrid& g, const std::function<Vec3(const Point&)>& fn) {
    return sample<3>(g, fn);
}
inline TensorField sample_tensor(const CartesianGrid& g, const std::function<Tensor3(const Point&)>& fn) {
    return sample<9>(g, fn);
}

/// Node field values at one time level: displacement, micro-distortion and their rates.
struct SimulationState {
    double time = 0.0;
    VectorField u;
    VectorField u_t;
    TensorField P;
    TensorField P_t;

    SimulationState() = default;
    explicit SimulationState(const CartesianGrid& g, double t = 0.0) : time(t), u(g), u_t(g), P(g), P_t(g) {}

    const CartesianGrid& grid() const { return u.grid(); }

    /// Throws if the four fields do not share one grid.
    void check_consistent() const {
        u.check_same(u_t);
        P.check_same(P_t);
        u.check_same_grid(P);
    }
};

}  // namespace relaxmm
