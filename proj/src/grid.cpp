#include "relaxmm/grid.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace relaxmm {

CartesianGrid::CartesianGrid(std::array<double, 3> lengths, std::array<int, 3> counts, Topology topology,
                             Point origin)
    : lengths_(lengths), counts_(counts), origin_(origin), topology_(topology) {
    for (std::size_t a = 0; a < 3; ++a) {
        if (!(lengths_[a] > 0.0))
            throw std::invalid_argument("grid length along axis " + std::to_string(a + 1) + " must be positive");
        const int min_count = periodic() ? 3 : 4;
        if (counts_[a] < min_count)
            throw std::invalid_argument("grid needs at least " + std::to_string(min_count) + " nodes along axis " +
                                        std::to_string(a + 1));
        spacing_[a] = periodic() ? lengths_[a] / counts_[a] : lengths_[a] / (counts_[a] - 1);
    }
    strides_ = {1, counts_[0], static_cast<std::ptrdiff_t>(counts_[0]) * counts_[1]};
    node_count_ = static_cast<std::size_t>(counts_[0]) * counts_[1] * counts_[2];
}

double CartesianGrid::h_min() const { return std::min({spacing_[0], spacing_[1], spacing_[2]}); }

NodeIndex CartesianGrid::node(std::size_t idx) const {
    const auto nx = static_cast<std::size_t>(counts_[0]);
    const auto ny = static_cast<std::size_t>(counts_[1]);
    return {static_cast<int>(idx % nx), static_cast<int>((idx / nx) % ny), static_cast<int>(idx / (nx * ny))};
}

std::uint8_t CartesianGrid::face_mask(const NodeIndex& n) const {
    if (periodic()) return 0;
    std::uint8_t m = 0;
    for (int a = 0; a < 3; ++a) {
        if (n[a] == 0) m |= static_cast<std::uint8_t>(1u << (2 * a));
        if (n[a] == counts_[static_cast<std::size_t>(a)] - 1) m |= static_cast<std::uint8_t>(1u << (2 * a + 1));
    }
    return m;
}

bool CartesianGrid::on_axis_face(const NodeIndex& n, int axis) const {
    if (periodic()) return false;
    return n[axis] == 0 || n[axis] == counts_[static_cast<std::size_t>(axis)] - 1;
}

Vec3 face_normal(int face) {
    Vec3 n{0.0, 0.0, 0.0};
    n[static_cast<std::size_t>(face / 2)] = (face % 2 == 0) ? -1.0 : 1.0;
    return n;
}

}  // namespace relaxmm
