#pragma once

#include <array>
#include <cstdint>

#include "relaxmm/field.hpp"

namespace relaxmm {

/// Smooth data compatible with homogeneous boundary conditions on a bounded grid,
/// built from modes m = (m_1, m_2, m_3) with m_a >= 1:
///   u_i  ~ sin(m_1 pi s_1) sin(m_2 pi s_2) sin(m_3 pi s_3)
///   P_ij ~ cos(m_j pi s_j) prod_{k != j} sin(m_k pi s_k)
/// where s = (x - origin) / lengths. Each P_ij vanishes on the faces where it
/// is a tangential component.
struct ModeShape {
    std::array<int, 3> m{1, 1, 1};
    Vec3 u_amplitude{};
    Tensor3 P_amplitude;
};

/// Adds the mode to the fields (value, not rate).
void add_mode(VectorField& u, TensorField& P, const ModeShape& mode);

/// Single-mode displacement and micro-distortion at rest.
SimulationState standing_wave_state(const CartesianGrid& grid, const std::array<int, 3>& m, double amplitude);

/// Superposition of all modes with 1 <= m_a <= max_mode for both the values and
/// the rates, with random coefficients in [-1, 1] / |m|^2 scaled by amplitude.
SimulationState random_band_limited_state(const CartesianGrid& grid, int max_mode, std::uint64_t seed,
                                          double amplitude = 1.0);

}  // namespace relaxmm
