#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "relaxmm/tensor.hpp"

namespace relaxmm {

struct NodeIndex {
    int i = 0;
    int j = 0;
    int k = 0;
    int operator[](int axis) const { return axis == 0 ? i : (axis == 1 ? j : k); }
    friend bool operator==(const NodeIndex&, const NodeIndex&) = default;
};

/// Axis-aligned box [origin, origin + lengths] sampled on a uniform node lattice.
///
/// Bounded grids place nodes on both end faces, so spacing = length / (count - 1)
/// and at least four nodes per axis are required for the boundary stencils.
/// Periodic grids identify the two end faces; the node at origin + length is not
/// stored and spacing = length / count.
///
/// Linear node index: i + nx * (j + ny * k), x fastest.
class CartesianGrid {
public:
    enum class Topology { bounded, periodic };

    CartesianGrid() = default;
    CartesianGrid(std::array<double, 3> lengths, std::array<int, 3> counts, Topology topology = Topology::bounded,
                  Point origin = {0.0, 0.0, 0.0});

    /// Unit-length cube with n nodes per axis.
    static CartesianGrid unit_cube(int n) { return CartesianGrid({1.0, 1.0, 1.0}, {n, n, n}); }

    const std::array<double, 3>& lengths() const { return lengths_; }
    const std::array<int, 3>& counts() const { return counts_; }
    const std::array<double, 3>& spacing() const { return spacing_; }
    const Point& origin() const { return origin_; }
    Topology topology() const { return topology_; }
    bool periodic() const { return topology_ == Topology::periodic; }

    double h_min() const;
    std::size_t node_count() const { return node_count_; }
    std::ptrdiff_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }

    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(counts_[0]) * (static_cast<std::size_t>(j) +
                                                        static_cast<std::size_t>(counts_[1]) * static_cast<std::size_t>(k));
    }
    std::size_t index(const NodeIndex& n) const { return index(n.i, n.j, n.k); }
    NodeIndex node(std::size_t idx) const;

    double coordinate(int axis, int i) const {
        return origin_[static_cast<std::size_t>(axis)] + i * spacing_[static_cast<std::size_t>(axis)];
    }
    Point position(const NodeIndex& n) const { return {coordinate(0, n.i), coordinate(1, n.j), coordinate(2, n.k)}; }
    Point position(std::size_t idx) const { return position(node(idx)); }

    /// Bit f set when the node lies on face f; faces are ordered
    /// (x-low, x-high, y-low, y-high, z-low, z-high). Always 0 on periodic grids.
    std::uint8_t face_mask(const NodeIndex& n) const;
    bool on_boundary(const NodeIndex& n) const { return face_mask(n) != 0; }

    /// True when the node lies on a face whose normal is along `axis`.
    bool on_axis_face(const NodeIndex& n, int axis) const;

    friend bool operator==(const CartesianGrid& a, const CartesianGrid& b) {
        return a.lengths_ == b.lengths_ && a.counts_ == b.counts_ && a.topology_ == b.topology_ &&
               a.origin_ == b.origin_;
    }

private:
    std::array<double, 3> lengths_{1.0, 1.0, 1.0};
    std::array<int, 3> counts_{4, 4, 4};
    std::array<double, 3> spacing_{};
    Point origin_{};
    Topology topology_ = Topology::bounded;
    std::array<std::ptrdiff_t, 3> strides_{};
    std::size_t node_count_ = 0;
};

/// Outward unit normal of face f (see CartesianGrid::face_mask).
Vec3 face_normal(int face);

}  // namespace relaxmm
