#pragma once

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "relaxmm/field.hpp"
#include "relaxmm/material.hpp"

namespace relaxmm {

using Matrix12c = Eigen::Matrix<std::complex<double>, 12, 12>;
using Vector12c = Eigen::Matrix<std::complex<double>, 12, 1>;

/// Plane-wave operator of the equations of motion for (u, P) proportional to
/// exp(i(<k, x> - omega t)): omega^2 w = B(k) w.
///
/// Unknown ordering: (u_1, u_2, u_3, P_11, P_12, P_13, P_21, ..., P_33).
struct PlaneWaveMatrix {
    Matrix12c B;
    Vec3 k{};

    /// max |B - B^*| entrywise.
    double hermitian_defect() const;
};

PlaneWaveMatrix assemble_plane_wave_matrix(const MaterialParameters& p, const Vec3& k);

/// Eigenvalues omega^2 of B, ascending.
std::array<double, 12> plane_wave_eigenvalues(const PlaneWaveMatrix& m);

struct PlaneWaveMode {
    double omega_squared = 0.0;
    Vector12c shape;  // unit-norm eigenvector
};

/// All eigenpairs of B, ascending in omega^2.
std::array<PlaneWaveMode, 12> plane_wave_modes(const PlaneWaveMatrix& m);

struct BandGap {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
};

struct DispersionResult {
    Vec3 direction{};
    std::vector<double> k_samples;
    std::vector<std::array<double, 12>> branches;  // omega per sample, ascending
    std::vector<BandGap> gaps;
};

/// Samples omega_j(kappa * direction) for kappa uniform on [0, k_max].
/// Branches are ordered by sorting only. Gaps are filled with find_band_gaps at
/// gap_resolution when it is given.
DispersionResult band_structure(const MaterialParameters& p, const Vec3& direction, double k_max, int samples,
                                std::optional<double> gap_resolution = std::nullopt);

/// Frequency intervals in [lowest sampled frequency, upper] not reached by any
/// branch; with no branches the whole of [0, upper] is one gap. Between two
/// consecutive k samples a branch is taken to cover every frequency between its
/// two sampled values. Gaps narrower than resolution are dropped. upper
/// defaults to the largest sampled frequency.
std::vector<BandGap> find_band_gaps(const DispersionResult& result, double resolution,
                                    std::optional<double> upper = std::nullopt);

/// k with k_a = 2 pi n_a / L_a: a wavevector that is periodic on the grid's box.
Vec3 lattice_wavevector(const CartesianGrid& grid, const std::array<int, 3>& n);

/// Travelling plane wave Re(a w exp(i(<k, x> - omega t))) at t = 0 for eigenpair
/// `branch` (ascending omega) of B(k), k = lattice_wavevector(n), values and
/// rates. Requires a periodic grid and n != 0.
SimulationState plane_wave_state(const CartesianGrid& grid, const MaterialParameters& p, const std::array<int, 3>& n,
                                 int branch, double amplitude = 1.0);

/// Complex amplitude of a plane-wave mode in a state: the normalized projection
/// of (u, P) onto w exp(i<k, x>). For the state of plane_wave_state advanced in
/// time it is (a / 2) exp(-i omega t).
class PlaneWaveProjector {
public:
    PlaneWaveProjector(const CartesianGrid& grid, const MaterialParameters& p, const std::array<int, 3>& n, int branch);

    std::complex<double> amplitude(const SimulationState& s) const;
    double omega() const { return omega_; }
    const Vec3& k() const { return k_; }

private:
    Vector12c w_;
    Vec3 k_{};
    double omega_ = 0.0;
    std::vector<std::complex<double>> phase_;  // exp(-i<k, x>) per node
};

/// Angular frequency from samples c(t_s) ~ exp(-i omega t): least-squares slope
/// of the unwrapped phase. Needs at least two samples spaced below half a period.
double fit_frequency(const std::vector<double>& times, const std::vector<std::complex<double>>& amplitudes);

}  // namespace relaxmm
