#include "relaxmm/energy.hpp"

#include <stdexcept>

#include "relaxmm/dynamics.hpp"
#include "relaxmm/quadrature.hpp"

namespace relaxmm {

EnergyBreakdown& EnergyBreakdown::operator*=(double s) {
    for (double* v : {&kinetic_u, &kinetic_P, &elastic_sym, &elastic_trace, &elastic_skew, &micro_sym, &micro_trace,
                      &curvature, &total})
        *v *= s;
    return *this;
}

EnergyBreakdown total_energy(const SimulationState& state, const MaterialParameters& p, const ScalarField* weight,
                             Closure closure) {
    state.check_consistent();
    const auto& g = state.grid();
    if (weight) state.u.check_same_grid(*weight);

    const TensorField grad = gradient(state.u, closure);
    const TensorField curl = curl_tensor(state.P, closure);

    const std::size_t n = g.node_count();
    // densities per part, accumulated into scalar fields so the shared quadrature applies
    std::array<ScalarField, 8> dens;
    for (auto& d : dens) d = ScalarField(g);
    const double kc = 0.5 * p.curvature_modulus();
    for (std::size_t q = 0; q < n; ++q) {
        const Tensor3 P = get_tensor(state.P, q);
        const Tensor3 e = get_tensor(grad, q) - P;
        const LocalEnergy le = local_energy(p, e, P);
        const double w2 = weight ? (*weight)(0, q) * (*weight)(0, q) : 1.0;
        double vu = 0.0, vp = 0.0, cc = 0.0;
        for (std::size_t c = 0; c < 3; ++c) vu += state.u_t(c, q) * state.u_t(c, q);
        for (std::size_t c = 0; c < 9; ++c) {
            vp += state.P_t(c, q) * state.P_t(c, q);
            cc += curl(c, q) * curl(c, q);
        }
        dens[0](0, q) = w2 * 0.5 * vu;
        dens[1](0, q) = w2 * 0.5 * vp;
        dens[2](0, q) = w2 * le.elastic_sym;
        dens[3](0, q) = w2 * le.elastic_trace;
        dens[4](0, q) = w2 * le.elastic_skew;
        dens[5](0, q) = w2 * le.micro_sym;
        dens[6](0, q) = w2 * le.micro_trace;
        dens[7](0, q) = w2 * kc * cc;
    }

    EnergyBreakdown b;
    b.kinetic_u = integrate_scalar(dens[0]);
    b.kinetic_P = integrate_scalar(dens[1]);
    b.elastic_sym = integrate_scalar(dens[2]);
    b.elastic_trace = integrate_scalar(dens[3]);
    b.elastic_skew = integrate_scalar(dens[4]);
    b.micro_sym = integrate_scalar(dens[5]);
    b.micro_trace = integrate_scalar(dens[6]);
    b.curvature = integrate_scalar(dens[7]);
    b.total = b.sum_of_parts();
    return b;
}

std::vector<double> energy_balance_residual(const Trajectory& trajectory, const SourceTerms& src) {
    const auto& st = trajectory.states;
    if (st.size() != trajectory.records.size())
        throw std::invalid_argument("energy_balance_residual: trajectory must keep its states");
    std::vector<double> out;
    if (st.size() < 2) return out;
    double prev_power = source_power(st[0], src);
    for (std::size_t q = 0; q + 1 < st.size(); ++q) {
        const double next_power = source_power(st[q + 1], src);
        const double dt = st[q + 1].time - st[q].time;
        out.push_back(trajectory.records[q + 1].energy.total - trajectory.records[q].energy.total -
                      0.5 * dt * (prev_power + next_power));
        prev_power = next_power;
    }
    return out;
}

}  // namespace relaxmm
