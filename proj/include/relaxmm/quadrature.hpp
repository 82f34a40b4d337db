#pragma once

#include <optional>
#include <vector>

#include "relaxmm/field.hpp"

namespace relaxmm {

/// Inclusive node-index box, used for integrating over aligned sub-regions.
struct NodeBox {
    NodeIndex lo;
    NodeIndex hi;

    static NodeBox whole(const CartesianGrid& g) {
        return {{0, 0, 0}, {g.counts()[0] - 1, g.counts()[1] - 1, g.counts()[2] - 1}};
    }
    bool contains(const NodeIndex& n) const {
        for (int a = 0; a < 3; ++a)
            if (n[a] < lo[a] || n[a] > hi[a]) return false;
        return true;
    }
};

/// Trapezoidal weights along one axis of the sub-range [lo, hi]; the grid's
/// periodic axes use uniform weights over the whole range.
std::vector<double> axis_weights(const CartesianGrid& g, int axis, int lo, int hi);

/// Product trapezoidal weights per node over the whole grid.
ScalarField quadrature_weights(const CartesianGrid& g);

/// Trapezoidal-rule integral over the box (product rule per axis).
double integrate_scalar(const ScalarField& f);

/// Trapezoidal integral over an aligned sub-box (weights of the sub-box itself).
double integrate_scalar(const ScalarField& f, const NodeBox& box);

/// Integral of the pointwise squared Euclidean/Frobenius norm, optionally
/// multiplied by weight^2 inside the integrand.
template <std::size_t NC>
double l2_norm_squared(const NodeField<NC>& field, const ScalarField* weight = nullptr,
                       std::optional<NodeBox> box = std::nullopt);

/// Pointwise squared norm as a scalar field.
template <std::size_t NC>
ScalarField pointwise_norm_squared(const NodeField<NC>& field);

extern template double l2_norm_squared<1>(const NodeField<1>&, const ScalarField*, std::optional<NodeBox>);
extern template double l2_norm_squared<3>(const NodeField<3>&, const ScalarField*, std::optional<NodeBox>);
extern template double l2_norm_squared<9>(const NodeField<9>&, const ScalarField*, std::optional<NodeBox>);
extern template ScalarField pointwise_norm_squared<1>(const NodeField<1>&);
extern template ScalarField pointwise_norm_squared<3>(const NodeField<3>&);
extern template ScalarField pointwise_norm_squared<9>(const NodeField<9>&);

}  // namespace relaxmm
