#include "relaxmm/initial_data.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace relaxmm {

void add_mode(VectorField& u, TensorField& P, const ModeShape& mode) {
    u.check_same_grid(P);
    const auto& g = u.grid();
    if (g.periodic()) throw std::invalid_argument("mode shapes need a bounded grid");
    for (int m : mode.m)
        if (m < 1) throw std::invalid_argument("mode numbers must be >= 1");
    // per-axis sin and cos tables
    std::array<std::vector<double>, 3> s, c;
    for (std::size_t a = 0; a < 3; ++a) {
        const int n = g.counts()[a];
        s[a].resize(static_cast<std::size_t>(n));
        c[a].resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double arg = mode.m[a] * std::numbers::pi * i / (n - 1);
            s[a][static_cast<std::size_t>(i)] = std::sin(arg);
            c[a][static_cast<std::size_t>(i)] = std::cos(arg);
        }
    }
    for (std::size_t q = 0; q < g.node_count(); ++q) {
        const NodeIndex n = g.node(q);
        const std::size_t ix[3] = {static_cast<std::size_t>(n.i), static_cast<std::size_t>(n.j),
                                   static_cast<std::size_t>(n.k)};
        const double sx = s[0][ix[0]], sy = s[1][ix[1]], sz = s[2][ix[2]];
        const double S = sx * sy * sz;
        const double col[3] = {c[0][ix[0]] * sy * sz, sx * c[1][ix[1]] * sz, sx * sy * c[2][ix[2]]};
        for (std::size_t i = 0; i < 3; ++i) {
            u(i, q) += mode.u_amplitude[i] * S;
            for (int j = 0; j < 3; ++j)
                P(3 * i + static_cast<std::size_t>(j), q) += mode.P_amplitude(static_cast<int>(i), j) * col[j];
        }
    }
}

SimulationState standing_wave_state(const CartesianGrid& grid, const std::array<int, 3>& m, double amplitude) {
    SimulationState s(grid);
    ModeShape mode;
    mode.m = m;
    mode.u_amplitude = {amplitude, 0.5 * amplitude, -0.25 * amplitude};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) mode.P_amplitude(i, j) = amplitude * (i == j ? 0.2 : 0.1 * (i - j));
    add_mode(s.u, s.P, mode);
    return s;
}

SimulationState random_band_limited_state(const CartesianGrid& grid, int max_mode, std::uint64_t seed,
                                          double amplitude) {
    if (max_mode < 1) throw std::invalid_argument("max_mode must be >= 1");
    SimulationState s(grid);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int m3 = 1; m3 <= max_mode; ++m3)
        for (int m2 = 1; m2 <= max_mode; ++m2)
            for (int m1 = 1; m1 <= max_mode; ++m1) {
                const double scale = amplitude / (m1 * m1 + m2 * m2 + m3 * m3);
                for (int rate = 0; rate < 2; ++rate) {
                    ModeShape mode;
                    mode.m = {m1, m2, m3};
                    for (auto& v : mode.u_amplitude) v = scale * d(rng);
                    for (auto& v : mode.P_amplitude.a) v = scale * d(rng);
                    if (rate)
                        add_mode(s.u_t, s.P_t, mode);
                    else
                        add_mode(s.u, s.P, mode);
                }
            }
    return s;
}

}  // namespace relaxmm
