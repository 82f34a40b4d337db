#include "relaxmm/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace relaxmm {

CutoffSpec CutoffSpec::centered(const CartesianGrid& g, double inner_fraction, double outer_fraction) {
    CutoffSpec s;
    for (std::size_t a = 0; a < 3; ++a) {
        const double mid = g.origin()[a] + 0.5 * g.lengths()[a];
        s.inner.lo[a] = mid - 0.5 * inner_fraction * g.lengths()[a];
        s.inner.hi[a] = mid + 0.5 * inner_fraction * g.lengths()[a];
        s.outer.lo[a] = mid - 0.5 * outer_fraction * g.lengths()[a];
        s.outer.hi[a] = mid + 0.5 * outer_fraction * g.lengths()[a];
    }
    return s;
}

double CutoffSpec::inner_clearance(int axis, int sign) const {
    const auto a = static_cast<std::size_t>(axis);
    return sign > 0 ? outer.hi[a] - inner.hi[a] : inner.lo[a] - outer.lo[a];
}

double CutoffSpec::outer_clearance(const CartesianGrid& g, int axis, int sign) const {
    const auto a = static_cast<std::size_t>(axis);
    return sign > 0 ? g.origin()[a] + g.lengths()[a] - outer.hi[a] : outer.lo[a] - g.origin()[a];
}

double CutoffSpec::inner_margin() const {
    double m = inner_clearance(0, 1);
    for (int a = 0; a < 3; ++a) m = std::min({m, inner_clearance(a, 1), inner_clearance(a, -1)});
    return m;
}

void CutoffSpec::validate(const CartesianGrid& g) const {
    for (int a = 0; a < 3; ++a) {
        const auto i = static_cast<std::size_t>(a);
        if (!(inner.lo[i] < inner.hi[i])) throw std::invalid_argument("cutoff: inner box is empty");
        for (int s : {-1, 1}) {
            if (!(inner_clearance(a, s) > 0.0)) throw std::invalid_argument("cutoff: inner box must lie strictly inside the outer box");
            if (!(outer_clearance(g, a, s) > 0.0))
                throw std::invalid_argument("cutoff: outer box must lie strictly inside the domain");
        }
    }
}

double smoothstep5(double t) {
    t = std::clamp(t, 0.0, 1.0);
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

ScalarField cutoff_eta(const CartesianGrid& g, const CutoffSpec& spec) {
    if (g.periodic()) throw std::invalid_argument("cutoff: needs a bounded grid");
    spec.validate(g);
    for (int a = 0; a < 3; ++a)
        for (int s : {-1, 1})
            if (spec.inner_clearance(a, s) < 2.0 * g.spacing()[static_cast<std::size_t>(a)] * (1.0 - 1e-12)) {
                std::ostringstream os;
                os << "cutoff: margin " << spec.inner_clearance(a, s) << " along axis " << a
                   << " is thinner than two grid spacings";
                throw std::invalid_argument(os.str());
            }
    std::array<std::vector<double>, 3> ramp;
    for (std::size_t a = 0; a < 3; ++a) {
        const int n = g.counts()[a];
        ramp[a].resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double x = g.coordinate(static_cast<int>(a), i);
            const double up = (x - spec.outer.lo[a]) / (spec.inner.lo[a] - spec.outer.lo[a]);
            const double down = (spec.outer.hi[a] - x) / (spec.outer.hi[a] - spec.inner.hi[a]);
            ramp[a][static_cast<std::size_t>(i)] = smoothstep5(std::min(up, down));
        }
    }
    ScalarField eta(g);
    for (std::size_t q = 0; q < g.node_count(); ++q) {
        const NodeIndex n = g.node(q);
        eta(0, q) = ramp[0][static_cast<std::size_t>(n.i)] * ramp[1][static_cast<std::size_t>(n.j)] *
                    ramp[2][static_cast<std::size_t>(n.k)];
    }
    return eta;
}

int lattice_steps(const CartesianGrid& g, int axis, double h) {
    if (axis < 0 || axis > 2) throw std::invalid_argument("difference quotient: axis must be 0, 1 or 2");
    const double sp = g.spacing()[static_cast<std::size_t>(axis)];
    const double m = std::round(h / sp);
    if (m == 0.0 || std::abs(h - m * sp) > 1e-9 * sp) {
        std::ostringstream os;
        os << "difference quotient: h = " << h << " is not a nonzero multiple of the spacing " << sp;
        throw std::invalid_argument(os.str());
    }
    return static_cast<int>(m);
}

template <std::size_t NC>
NodeField<NC> difference_quotient(const NodeField<NC>& phi, int axis, double h) {
    const auto& g = phi.grid();
    const int m = lattice_steps(g, axis, h);
    if (g.periodic()) throw std::invalid_argument("difference quotient: needs a bounded grid");
    NodeField<NC> out(g);
    const int n = g.counts()[static_cast<std::size_t>(axis)];
    const std::ptrdiff_t shift = m * g.stride(axis);
    const double inv = 1.0 / h;
    for (std::size_t q = 0; q < g.node_count(); ++q) {
        const int pos = g.node(q)[axis] + m;
        if (pos < 0 || pos >= n) continue;
        const auto t = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(q) + shift);
        for (std::size_t c = 0; c < NC; ++c) out(c, q) = (phi(c, t) - phi(c, q)) * inv;
    }
    return out;
}

template <std::size_t NC>
NodeField<NC> difference_quotient(const NodeField<NC>& phi, int axis, double h, const CutoffSpec& spec) {
    spec.validate(phi.grid());
    lattice_steps(phi.grid(), axis, h);
    if (std::abs(h) > spec.outer_clearance(phi.grid(), axis, h > 0 ? 1 : -1) * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "difference quotient: |h| = " << std::abs(h) << " exceeds the distance from U to the boundary along axis "
           << axis;
        throw std::invalid_argument(os.str());
    }
    return difference_quotient(phi, axis, h);
}

template NodeField<1> difference_quotient<1>(const NodeField<1>&, int, double);
template NodeField<3> difference_quotient<3>(const NodeField<3>&, int, double);
template NodeField<9> difference_quotient<9>(const NodeField<9>&, int, double);
template NodeField<1> difference_quotient<1>(const NodeField<1>&, int, double, const CutoffSpec&);
template NodeField<3> difference_quotient<3>(const NodeField<3>&, int, double, const CutoffSpec&);
template NodeField<9> difference_quotient<9>(const NodeField<9>&, int, double, const CutoffSpec&);

EnergyBreakdown localized_energy(const SimulationState& state, const MaterialParameters& p, const ScalarField& eta,
                                 int axis, double h, Closure closure) {
    SimulationState d(state.grid(), state.time);
    d.u = difference_quotient(state.u, axis, h);
    d.u_t = difference_quotient(state.u_t, axis, h);
    d.P = difference_quotient(state.P, axis, h);
    d.P_t = difference_quotient(state.P_t, axis, h);
    return total_energy(d, p, &eta, closure);
}

EnergyBreakdown localized_energy(const SimulationState& state, const MaterialParameters& p, const CutoffSpec& spec,
                                 int axis, double h, Closure closure) {
    const auto& g = state.grid();
    const auto eta = cutoff_eta(g, spec);
    if (std::abs(h) > spec.outer_clearance(g, axis, h > 0 ? 1 : -1) * (1.0 + 1e-12))
        throw std::invalid_argument("localized_energy: |h| exceeds the distance from U to the boundary");
    return localized_energy(state, p, eta, axis, h, closure);
}

NodeBox aligned_node_box(const CartesianGrid& g, const Box& b) {
    NodeBox nb;
    int* lo[3] = {&nb.lo.i, &nb.lo.j, &nb.lo.k};
    int* hi[3] = {&nb.hi.i, &nb.hi.j, &nb.hi.k};
    for (std::size_t a = 0; a < 3; ++a) {
        const double sp = g.spacing()[a];
        const double fl = (b.lo[a] - g.origin()[a]) / sp, fh = (b.hi[a] - g.origin()[a]) / sp;
        const double rl = std::round(fl), rh = std::round(fh);
        if (std::abs(fl - rl) > 1e-9 || std::abs(fh - rh) > 1e-9 || rl < 0 || rh > g.counts()[a] - 1)
            throw std::invalid_argument("box faces must lie on node planes of the grid");
        *lo[a] = static_cast<int>(rl);
        *hi[a] = static_cast<int>(rh);
    }
    return nb;
}

template <std::size_t NC>
DifferenceQuotientCheck dq_theorem_check(const NodeField<NC>& phi, const CutoffSpec& spec, int axis, double h) {
    const auto& g = phi.grid();
    spec.validate(g);
    lattice_steps(g, axis, h);
    if (std::abs(h) > spec.inner_clearance(axis, h > 0 ? 1 : -1) * (1.0 + 1e-12))
        throw std::invalid_argument("dq_theorem_check: |h| exceeds the distance from V to the boundary of U");
    const NodeBox v = aligned_node_box(g, spec.inner);
    const NodeBox u = aligned_node_box(g, spec.outer);

    const auto dq = difference_quotient(phi, axis, h);
    DifferenceQuotientCheck r;
    r.lhs = std::sqrt(l2_norm_squared(dq, nullptr, v));
    double grad = 0.0;
    for (std::size_t c = 0; c < NC; ++c) {
        for (int j = 0; j < 3; ++j) {
            ScalarField d(g);
            apply_derivative(phi.comp(c), d.comp(0), g, j, Closure::one_sided);
            grad += l2_norm_squared(d, nullptr, u);
        }
    }
    r.rhs = std::sqrt(grad);
    if (r.rhs > 0.0) {
        r.ratio = r.lhs / r.rhs;
    } else {
        r.inconsistent = r.lhs > 0.0;
        r.ratio = r.inconsistent ? INFINITY : 0.0;
    }
    return r;
}

template DifferenceQuotientCheck dq_theorem_check<1>(const NodeField<1>&, const CutoffSpec&, int, double);
template DifferenceQuotientCheck dq_theorem_check<3>(const NodeField<3>&, const CutoffSpec&, int, double);
template DifferenceQuotientCheck dq_theorem_check<9>(const NodeField<9>&, const CutoffSpec&, int, double);

HSweepProbe::HSweepProbe(const CartesianGrid& g, const MaterialParameters& p, const CutoffSpec& spec,
                         std::vector<int> axes, std::vector<double> h_list, Closure closure)
    : p_(p), spec_(spec), eta_(cutoff_eta(g, spec)), closure_(closure) {
    if (axes.empty() || h_list.empty()) throw std::invalid_argument("h-sweep: axes and h list must be nonempty");
    for (int a : axes) {
        for (double h : h_list) {
            lattice_steps(g, a, h);
            if (std::abs(h) > spec.outer_clearance(g, a, h > 0 ? 1 : -1) * (1.0 + 1e-12)) {
                std::ostringstream os;
                os << "h-sweep: |h| = " << std::abs(h) << " exceeds the distance from U to the boundary along axis " << a;
                throw std::invalid_argument(os.str());
            }
            ProbeRow r;
            r.axis = a;
            r.h = h;
            rows_.push_back(r);
        }
    }
}

void HSweepProbe::observe(const SimulationState& s) {
    for (auto& r : rows_) {
        const auto e = localized_energy(s, p_, eta_, r.axis, r.h, closure_);
        if (observed_ == 0 || e.total > r.sup_energy) {
            r.sup_energy = e.total;
            r.sup_time = s.time;
            r.at_sup = e;
        }
    }
    ++observed_;
}

ProbeSummary HSweepProbe::summary() const {
    ProbeSummary s;
    s.rows = rows_;
    std::vector<int> axes;
    for (const auto& r : rows_)
        if (std::find(axes.begin(), axes.end(), r.axis) == axes.end()) axes.push_back(r.axis);
    for (int a : axes) {
        double lo = INFINITY, hi = 0.0;
        for (const auto& r : rows_) {
            if (r.axis != a) continue;
            lo = std::min(lo, r.sup_energy);
            hi = std::max(hi, r.sup_energy);
        }
        const double ratio = hi == 0.0 ? 1.0 : (lo > 0.0 ? hi / lo : INFINITY);
        s.axis_ratio.push_back(ratio);
        s.worst_ratio = std::max(s.worst_ratio, ratio);
    }
    return s;
}

ProbeSummary h_sweep_probe(const Trajectory& trajectory, const MaterialParameters& p, const CutoffSpec& spec,
                           const std::vector<int>& axes, const std::vector<double>& h_list) {
    if (trajectory.states.empty()) throw std::invalid_argument("h_sweep_probe: trajectory has no kept states");
    HSweepProbe probe(trajectory.states.front().grid(), p, spec, axes, h_list);
    for (const auto& s : trajectory.states) probe.observe(s);
    return probe.summary();
}

}  // namespace relaxmm
