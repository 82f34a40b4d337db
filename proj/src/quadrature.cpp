#include "relaxmm/quadrature.hpp"

#include <stdexcept>

namespace relaxmm {

std::vector<double> axis_weights(const CartesianGrid& g, int axis, int lo, int hi) {
    const auto a = static_cast<std::size_t>(axis);
    const double h = g.spacing()[a];
    if (lo < 0 || hi >= g.counts()[a] || lo > hi) throw std::invalid_argument("axis_weights: bad node range");
    std::vector<double> w(static_cast<std::size_t>(hi - lo + 1), h);
    const bool full_periodic = g.periodic() && lo == 0 && hi == g.counts()[a] - 1;
    if (!full_periodic) {
        w.front() *= 0.5;
        w.back() *= 0.5;
        if (lo == hi) w.front() = 0.0;
    }
    return w;
}

namespace {

double weighted_sum(const CartesianGrid& g, const NodeBox& box, const auto& value_at) {
    const auto wx = axis_weights(g, 0, box.lo.i, box.hi.i);
    const auto wy = axis_weights(g, 1, box.lo.j, box.hi.j);
    const auto wz = axis_weights(g, 2, box.lo.k, box.hi.k);
    double total = 0.0;
    for (int k = box.lo.k; k <= box.hi.k; ++k) {
        double plane = 0.0;
        for (int j = box.lo.j; j <= box.hi.j; ++j) {
            double line = 0.0;
            std::size_t n = g.index(box.lo.i, j, k);
            for (int i = box.lo.i; i <= box.hi.i; ++i, ++n) line += wx[static_cast<std::size_t>(i - box.lo.i)] * value_at(n);
            plane += wy[static_cast<std::size_t>(j - box.lo.j)] * line;
        }
        total += wz[static_cast<std::size_t>(k - box.lo.k)] * plane;
    }
    return total;
}

}  // namespace

ScalarField quadrature_weights(const CartesianGrid& g) {
    ScalarField w(g);
    const auto box = NodeBox::whole(g);
    const auto wx = axis_weights(g, 0, 0, box.hi.i);
    const auto wy = axis_weights(g, 1, 0, box.hi.j);
    const auto wz = axis_weights(g, 2, 0, box.hi.k);
    for (int k = 0; k <= box.hi.k; ++k)
        for (int j = 0; j <= box.hi.j; ++j)
            for (int i = 0; i <= box.hi.i; ++i)
                w(0, g.index(i, j, k)) = wx[static_cast<std::size_t>(i)] * wy[static_cast<std::size_t>(j)] *
                                         wz[static_cast<std::size_t>(k)];
    return w;
}

double integrate_scalar(const ScalarField& f) { return integrate_scalar(f, NodeBox::whole(f.grid())); }

double integrate_scalar(const ScalarField& f, const NodeBox& box) {
    const auto c = f.comp(0);
    return weighted_sum(f.grid(), box, [&](std::size_t n) { return c[n]; });
}

template <std::size_t NC>
ScalarField pointwise_norm_squared(const NodeField<NC>& field) {
    ScalarField s(field.grid());
    auto out = s.comp(0);
    for (std::size_t c = 0; c < NC; ++c) {
        const auto in = field.comp(c);
        for (std::size_t n = 0; n < in.size(); ++n) out[n] += in[n] * in[n];
    }
    return s;
}

template <std::size_t NC>
double l2_norm_squared(const NodeField<NC>& field, const ScalarField* weight, std::optional<NodeBox> box) {
    if (weight) field.check_same_grid(*weight);
    auto density = pointwise_norm_squared(field);
    if (weight) {
        auto d = density.comp(0);
        const auto w = weight->comp(0);
        for (std::size_t n = 0; n < d.size(); ++n) d[n] *= w[n] * w[n];
    }
    return integrate_scalar(density, box.value_or(NodeBox::whole(field.grid())));
}

template double l2_norm_squared<1>(const NodeField<1>&, const ScalarField*, std::optional<NodeBox>);
template double l2_norm_squared<3>(const NodeField<3>&, const ScalarField*, std::optional<NodeBox>);
template double l2_norm_squared<9>(const NodeField<9>&, const ScalarField*, std::optional<NodeBox>);
template ScalarField pointwise_norm_squared<1>(const NodeField<1>&);
template ScalarField pointwise_norm_squared<3>(const NodeField<3>&);
template ScalarField pointwise_norm_squared<9>(const NodeField<9>&);

}  // namespace relaxmm
