#include "relaxmm/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace relaxmm {

namespace {

using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};

Tensor3 unit(int i, int j) {
    Tensor3 t;
    t(i, j) = 1.0;
    return t;
}

Tensor3 outer(const Vec3& a, const Vec3& b) {
    Tensor3 t;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) t(i, j) = a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)];
    return t;
}

double b_min(const DispersionResult& r) {
    if (r.branches.empty()) return 0.0;
    double m = r.branches.front()[0];
    for (const auto& s : r.branches) m = std::min(m, *std::min_element(s.begin(), s.end()));
    return m;
}

}  // namespace

double PlaneWaveMatrix::hermitian_defect() const { return (B - B.adjoint()).cwiseAbs().maxCoeff(); }

PlaneWaveMatrix assemble_plane_wave_matrix(const MaterialParameters& p, const Vec3& k) {
    PlaneWaveMatrix m;
    m.k = k;
    m.B.setZero();
    const double ell = p.curvature_modulus();
    const double kk = dot(k, k);

    // Column-by-column: apply the operator to each unit unknown.
    for (int c = 0; c < 3; ++c) {
        Vec3 e{};
        e[static_cast<std::size_t>(c)] = 1.0;
        const Tensor3 s = cauchy_stress(p, outer(e, k));
        const Vec3 sk = matvec(s, k);
        for (int r = 0; r < 3; ++r) m.B(r, c) = sk[static_cast<std::size_t>(r)];
        for (int r = 0; r < 9; ++r) m.B(3 + r, c) = -kI * s.a[static_cast<std::size_t>(r)];
    }
    for (int c = 0; c < 9; ++c) {
        const Tensor3 P = unit(c / 3, c % 3);
        const Tensor3 s = cauchy_stress(p, P);
        const Vec3 sk = matvec(s, k);
        for (int r = 0; r < 3; ++r) m.B(r, 3 + c) = kI * sk[static_cast<std::size_t>(r)];

        Tensor3 local = s + micro_stress(p, P);
        // curl curl of row i maps to |k|^2 P_i - k (k . P_i)
        for (int i = 0; i < 3; ++i) {
            const Vec3 pi = row(P, i);
            const double kp = dot(k, pi);
            for (int j = 0; j < 3; ++j)
                local(i, j) += ell * (kk * pi[static_cast<std::size_t>(j)] - k[static_cast<std::size_t>(j)] * kp);
        }
        for (int r = 0; r < 9; ++r) m.B(3 + r, 3 + c) = local.a[static_cast<std::size_t>(r)];
    }
    return m;
}

std::array<double, 12> plane_wave_eigenvalues(const PlaneWaveMatrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix12c> es(m.B, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("plane-wave eigensolver failed");
    std::array<double, 12> out{};
    for (int q = 0; q < 12; ++q) out[static_cast<std::size_t>(q)] = es.eigenvalues()(q);
    return out;
}

std::array<PlaneWaveMode, 12> plane_wave_modes(const PlaneWaveMatrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix12c> es(m.B);
    if (es.info() != Eigen::Success) throw std::runtime_error("plane-wave eigensolver failed");
    std::array<PlaneWaveMode, 12> out;
    for (int q = 0; q < 12; ++q) {
        out[static_cast<std::size_t>(q)].omega_squared = es.eigenvalues()(q);
        out[static_cast<std::size_t>(q)].shape = es.eigenvectors().col(q);
    }
    return out;
}

DispersionResult band_structure(const MaterialParameters& p, const Vec3& direction, double k_max, int samples,
                                std::optional<double> gap_resolution) {
    if (samples < 2) throw std::invalid_argument("band_structure: samples must be >= 2");
    if (!(k_max >= 0.0)) throw std::invalid_argument("band_structure: k_max must be >= 0");
    const double len = std::sqrt(dot(direction, direction));
    if (!(len > 0.0)) throw std::invalid_argument("band_structure: direction must be nonzero");

    DispersionResult r;
    r.direction = {direction[0] / len, direction[1] / len, direction[2] / len};
    for (int s = 0; s < samples; ++s) {
        const double kappa = k_max * s / (samples - 1);
        const Vec3 k{kappa * r.direction[0], kappa * r.direction[1], kappa * r.direction[2]};
        auto ev = plane_wave_eigenvalues(assemble_plane_wave_matrix(p, k));
        std::array<double, 12> omega{};
        for (std::size_t q = 0; q < 12; ++q) omega[q] = std::sqrt(std::max(ev[q], 0.0));
        std::sort(omega.begin(), omega.end());
        r.k_samples.push_back(kappa);
        r.branches.push_back(omega);
    }
    if (gap_resolution) r.gaps = find_band_gaps(r, *gap_resolution);
    return r;
}

std::vector<BandGap> find_band_gaps(const DispersionResult& result, double resolution, std::optional<double> upper) {
    if (!(resolution > 0.0)) throw std::invalid_argument("find_band_gaps: resolution must be > 0");
    std::vector<BandGap> covered;
    double top = 0.0;
    double bottom = b_min(result);
    const auto& b = result.branches;
    for (std::size_t s = 0; s < b.size(); ++s) {
        for (std::size_t j = 0; j < 12; ++j) {
            const double a = b[s][j];
            const double c = (s + 1 < b.size()) ? b[s + 1][j] : a;
            covered.push_back({std::min(a, c), std::max(a, c)});
            top = std::max(top, std::max(a, c));
        }
    }
    const double hi = upper.value_or(top);
    std::sort(covered.begin(), covered.end(), [](const BandGap& x, const BandGap& y) { return x.lo < y.lo; });

    std::vector<BandGap> gaps;
    double cursor = bottom;
    auto emit = [&](double lo, double up) {
        if (up - lo >= resolution) gaps.push_back({lo, up});
    };
    for (const auto& iv : covered) {
        if (iv.lo > hi) break;
        if (iv.lo > cursor) emit(cursor, iv.lo);
        cursor = std::max(cursor, iv.hi);
    }
    if (cursor < hi) emit(cursor, hi);
    return gaps;
}

Vec3 lattice_wavevector(const CartesianGrid& g, const std::array<int, 3>& n) {
    Vec3 k{};
    for (std::size_t a = 0; a < 3; ++a) k[a] = 2.0 * std::numbers::pi * n[a] / g.lengths()[a];
    return k;
}

namespace {

void check_plane_wave(const CartesianGrid& g, const std::array<int, 3>& n, int branch) {
    if (!g.periodic()) throw std::invalid_argument("plane waves need a periodic grid");
    if (n[0] == 0 && n[1] == 0 && n[2] == 0) throw std::invalid_argument("plane wave numbers must not all be zero");
    if (branch < 0 || branch >= 12) throw std::invalid_argument("branch must be in [0, 12)");
}

}  // namespace

SimulationState plane_wave_state(const CartesianGrid& g, const MaterialParameters& p, const std::array<int, 3>& n,
                                 int branch, double amplitude) {
    check_plane_wave(g, n, branch);
    require_valid(p);
    const Vec3 k = lattice_wavevector(g, n);
    const auto mode = plane_wave_modes(assemble_plane_wave_matrix(p, k))[static_cast<std::size_t>(branch)];
    const double omega = std::sqrt(std::max(mode.omega_squared, 0.0));
    const std::complex<double> I(0.0, 1.0);
    SimulationState s(g);
    for (std::size_t q = 0; q < g.node_count(); ++q) {
        const Point x = g.position(q);
        const std::complex<double> e = amplitude * std::exp(I * dot(k, x));
        for (std::size_t c = 0; c < 3; ++c) {
            s.u(c, q) = std::real(mode.shape(static_cast<Eigen::Index>(c)) * e);
            s.u_t(c, q) = std::real(-I * omega * mode.shape(static_cast<Eigen::Index>(c)) * e);
        }
        for (std::size_t c = 0; c < 9; ++c) {
            s.P(c, q) = std::real(mode.shape(static_cast<Eigen::Index>(3 + c)) * e);
            s.P_t(c, q) = std::real(-I * omega * mode.shape(static_cast<Eigen::Index>(3 + c)) * e);
        }
    }
    return s;
}

PlaneWaveProjector::PlaneWaveProjector(const CartesianGrid& g, const MaterialParameters& p, const std::array<int, 3>& n,
                                       int branch) {
    check_plane_wave(g, n, branch);
    k_ = lattice_wavevector(g, n);
    const auto mode = plane_wave_modes(assemble_plane_wave_matrix(p, k_))[static_cast<std::size_t>(branch)];
    w_ = mode.shape;
    omega_ = std::sqrt(std::max(mode.omega_squared, 0.0));
    phase_.resize(g.node_count());
    for (std::size_t q = 0; q < g.node_count(); ++q) phase_[q] = std::exp(std::complex<double>(0.0, -dot(k_, g.position(q))));
}

std::complex<double> PlaneWaveProjector::amplitude(const SimulationState& s) const {
    if (s.grid().node_count() != phase_.size()) throw std::invalid_argument("state does not match the projector grid");
    std::complex<double> acc = 0.0;
    for (std::size_t q = 0; q < phase_.size(); ++q) {
        std::complex<double> dotw = 0.0;
        for (std::size_t c = 0; c < 3; ++c) dotw += std::conj(w_(static_cast<Eigen::Index>(c))) * s.u(c, q);
        for (std::size_t c = 0; c < 9; ++c) dotw += std::conj(w_(static_cast<Eigen::Index>(3 + c))) * s.P(c, q);
        acc += phase_[q] * dotw;
    }
    return acc / static_cast<double>(phase_.size());
}

double fit_frequency(const std::vector<double>& t, const std::vector<std::complex<double>>& c) {
    if (t.size() != c.size() || t.size() < 2) throw std::invalid_argument("fit_frequency needs matching samples, at least two");
    std::vector<double> phi(c.size());
    phi[0] = std::arg(c[0]);
    for (std::size_t i = 1; i < c.size(); ++i) {
        double d = std::arg(c[i]) - std::arg(c[i - 1]);
        d -= 2.0 * std::numbers::pi * std::round(d / (2.0 * std::numbers::pi));
        phi[i] = phi[i - 1] + d;
    }
    double tm = 0.0, pm = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        tm += t[i];
        pm += phi[i];
    }
    tm /= static_cast<double>(t.size());
    pm /= static_cast<double>(t.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        num += (t[i] - tm) * (phi[i] - pm);
        den += (t[i] - tm) * (t[i] - tm);
    }
    if (!(den > 0.0)) throw std::invalid_argument("fit_frequency needs distinct sample times");
    return -num / den;
}

}  // namespace relaxmm
