#include "relaxmm/mms.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "relaxmm/quadrature.hpp"

namespace relaxmm {

namespace {

constexpr double kPi = std::numbers::pi;

/// f(s), f'(s), f''(s) of a one-variable factor.
struct Factor {
    double v = 0.0;
    double d = 0.0;
    double dd = 0.0;
};

SpatialJet product(const Factor& a, const Factor& b, const Factor& c) {
    const Factor f[3] = {a, b, c};
    SpatialJet j;
    j.value = a.v * b.v * c.v;
    for (int p = 0; p < 3; ++p) {
        const int q = (p + 1) % 3, r = (p + 2) % 3;
        j.grad[static_cast<std::size_t>(p)] = f[p].d * f[q].v * f[r].v;
        j.hess(p, p) = f[p].dd * f[q].v * f[r].v;
        j.hess(p, q) = j.hess(q, p) = f[p].d * f[q].d * f[r].v;
    }
    return j;
}

SpatialJet scaled(double s, SpatialJet j) {
    j.value *= s;
    for (double& g : j.grad) g *= s;
    j.hess *= s;
    return j;
}

SpatialJet operator+(SpatialJet a, const SpatialJet& b) {
    a.value += b.value;
    for (std::size_t c = 0; c < 3; ++c) a.grad[c] += b.grad[c];
    a.hess += b.hess;
    return a;
}

Factor sin_pi(double s) { return {std::sin(kPi * s), kPi * std::cos(kPi * s), -kPi * kPi * std::sin(kPi * s)}; }
Factor cos_pi(double s) { return {std::cos(kPi * s), -kPi * std::sin(kPi * s), -kPi * kPi * std::cos(kPi * s)}; }
Factor linear(double a, double b, double s) { return {a + b * s, b, 0.0}; }
Factor one() { return {1.0, 0.0, 0.0}; }

// |s - 1/2|^(5/2): C^2 with a non-differentiable second derivative at the midplane.
Factor kink(double s) {
    const double r = std::abs(s - 0.5), sg = s >= 0.5 ? 1.0 : -1.0;
    return {std::pow(r, 2.5), 2.5 * sg * std::pow(r, 1.5), 3.75 * std::sqrt(r)};
}

TimeJet cosine(double omega, double t) {
    return {std::cos(omega * t), -omega * std::sin(omega * t), -omega * omega * std::cos(omega * t)};
}

const Vec3 kTrigU{1.0, 0.5, -0.25};
const double kTrigP[9] = {0.2, 0.1, -0.3, 0.05, -0.15, 0.25, 0.3, 0.1, 0.2};
constexpr double kTrigOmega = 2.0;

ManufacturedCase::UJets trig_u(const Point& x) {
    const SpatialJet s = product(sin_pi(x[0]), sin_pi(x[1]), sin_pi(x[2]));
    return {scaled(kTrigU[0], s), scaled(kTrigU[1], s), scaled(kTrigU[2], s)};
}

// P_ij ~ cos(pi x_j) prod_{k != j} sin(pi x_k): tangential components vanish on the faces.
ManufacturedCase::PJets trig_P(const Point& x) {
    const Factor s[3] = {sin_pi(x[0]), sin_pi(x[1]), sin_pi(x[2])};
    const Factor c[3] = {cos_pi(x[0]), cos_pi(x[1]), cos_pi(x[2])};
    const SpatialJet col[3] = {product(c[0], s[1], s[2]), product(s[0], c[1], s[2]), product(s[0], s[1], c[2])};
    ManufacturedCase::PJets P;
    for (std::size_t q = 0; q < 9; ++q) P[q] = scaled(kTrigP[q], col[q % 3]);
    return P;
}

}  // namespace

ManufacturedCase::ManufacturedCase(std::string name, std::function<TimeJet(double)> tau_u,
                                   std::function<TimeJet(double)> tau_P, std::function<UJets(const Point&)> phi_u,
                                   std::function<PJets(const Point&)> phi_P)
    : name_(std::move(name)),
      tau_u_(std::move(tau_u)),
      tau_P_(std::move(tau_P)),
      phi_u_(std::move(phi_u)),
      phi_P_(std::move(phi_P)) {}

Vec3 ManufacturedCase::u(const Point& x, double t) const {
    const auto j = phi_u_(x);
    const double a = tau_u_(t).value;
    return {a * j[0].value, a * j[1].value, a * j[2].value};
}

Vec3 ManufacturedCase::u_t(const Point& x, double t) const {
    const auto j = phi_u_(x);
    const double a = tau_u_(t).rate;
    return {a * j[0].value, a * j[1].value, a * j[2].value};
}

Vec3 ManufacturedCase::u_tt(const Point& x, double t) const {
    const auto j = phi_u_(x);
    const double a = tau_u_(t).accel;
    return {a * j[0].value, a * j[1].value, a * j[2].value};
}

Tensor3 ManufacturedCase::P(const Point& x, double t) const {
    const auto j = phi_P_(x);
    const double a = tau_P_(t).value;
    Tensor3 out;
    for (std::size_t q = 0; q < 9; ++q) out.a[q] = a * j[q].value;
    return out;
}

Tensor3 ManufacturedCase::P_t(const Point& x, double t) const {
    const auto j = phi_P_(x);
    const double a = tau_P_(t).rate;
    Tensor3 out;
    for (std::size_t q = 0; q < 9; ++q) out.a[q] = a * j[q].value;
    return out;
}

Tensor3 ManufacturedCase::P_tt(const Point& x, double t) const {
    const auto j = phi_P_(x);
    const double a = tau_P_(t).accel;
    Tensor3 out;
    for (std::size_t q = 0; q < 9; ++q) out.a[q] = a * j[q].value;
    return out;
}

Tensor3 ManufacturedCase::grad_u(const Point& x, double t) const {
    const auto j = phi_u_(x);
    const double a = tau_u_(t).value;
    Tensor3 out;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) out(i, k) = a * j[static_cast<std::size_t>(i)].grad[static_cast<std::size_t>(k)];
    return out;
}

Tensor3 ManufacturedCase::curl_P(const Point& x, double t) const {
    const auto j = phi_P_(x);
    const double a = tau_P_(t).value;
    Tensor3 out;
    for (int i = 0; i < 3; ++i)
        for (int c = 0; c < 3; ++c) {
            const int b = (c + 1) % 3, d = (c + 2) % 3;
            out(i, c) = a * (j[static_cast<std::size_t>(3 * i + d)].grad[static_cast<std::size_t>(b)] -
                             j[static_cast<std::size_t>(3 * i + b)].grad[static_cast<std::size_t>(d)]);
        }
    return out;
}

ManufacturedCase::ForceParts ManufacturedCase::force_parts(const MaterialParameters& p, const Point& x) const {
    const auto ju = phi_u_(x);
    const auto jP = phi_P_(x);
    ForceParts f;
    for (std::size_t i = 0; i < 3; ++i) f.by_u_accel[i] = ju[i].value;
    // Div sigma(E)_i = sum_j sigma(d_j E)_ij
    for (int j = 0; j < 3; ++j) {
        Tensor3 Hu, GP;
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k) {
                Hu(i, k) = ju[static_cast<std::size_t>(i)].hess(j, k);
                GP(i, k) = jP[static_cast<std::size_t>(3 * i + k)].grad[static_cast<std::size_t>(j)];
            }
        const Tensor3 su = cauchy_stress(p, Hu), sP = cauchy_stress(p, GP);
        for (int i = 0; i < 3; ++i) {
            f.by_u[static_cast<std::size_t>(i)] -= su(i, j);
            f.by_P[static_cast<std::size_t>(i)] += sP(i, j);
        }
    }
    return f;
}

ManufacturedCase::MomentParts ManufacturedCase::moment_parts(const MaterialParameters& p, const Point& x) const {
    const auto ju = phi_u_(x);
    const auto jP = phi_P_(x);
    Tensor3 G, Pv, cc;
    for (int i = 0; i < 3; ++i)
        for (int a = 0; a < 3; ++a) {
            G(i, a) = ju[static_cast<std::size_t>(i)].grad[static_cast<std::size_t>(a)];
            Pv(i, a) = jP[static_cast<std::size_t>(3 * i + a)].value;
            // row-wise curl curl v = grad div v - laplacian v
            double div_grad = 0.0;
            for (int e = 0; e < 3; ++e) div_grad += jP[static_cast<std::size_t>(3 * i + e)].hess(a, e);
            cc(i, a) = div_grad - trace(jP[static_cast<std::size_t>(3 * i + a)].hess);
        }
    MomentParts m;
    m.by_P_accel = Pv;
    m.by_u = -1.0 * cauchy_stress(p, G);
    m.by_P = cauchy_stress(p, Pv) + micro_stress(p, Pv) + p.curvature_modulus() * cc;
    return m;
}

Vec3 ManufacturedCase::body_force(const MaterialParameters& p, const Point& x, double t) const {
    const auto f = force_parts(p, x);
    const TimeJet tu = tau_u_(t), tP = tau_P_(t);
    Vec3 out;
    for (std::size_t i = 0; i < 3; ++i) out[i] = tu.accel * f.by_u_accel[i] + tu.value * f.by_u[i] + tP.value * f.by_P[i];
    return out;
}

Tensor3 ManufacturedCase::body_moment(const MaterialParameters& p, const Point& x, double t) const {
    const auto m = moment_parts(p, x);
    const TimeJet tu = tau_u_(t), tP = tau_P_(t);
    return tP.accel * m.by_P_accel + tu.value * m.by_u + tP.value * m.by_P;
}

SimulationState ManufacturedCase::exact_state(const CartesianGrid& g, double t) const {
    SimulationState s(g, t);
    for (std::size_t q = 0; q < g.node_count(); ++q) {
        const Point x = g.position(q);
        set_vec(s.u, q, u(x, t));
        set_vec(s.u_t, q, u_t(x, t));
        set_tensor(s.P, q, P(x, t));
        set_tensor(s.P_t, q, P_t(x, t));
    }
    return s;
}

SourceTerms ManufacturedCase::sources(const MaterialParameters& p, const CartesianGrid& g) const {
    struct Cache {
        VectorField fa, fu, fP;
        TensorField Ma, Mu, MP;
    };
    auto c = std::make_shared<Cache>(Cache{VectorField(g), VectorField(g), VectorField(g), TensorField(g),
                                           TensorField(g), TensorField(g)});
    for (std::size_t q = 0; q < g.node_count(); ++q) {
        const Point x = g.position(q);
        const auto f = force_parts(p, x);
        const auto m = moment_parts(p, x);
        set_vec(c->fa, q, f.by_u_accel);
        set_vec(c->fu, q, f.by_u);
        set_vec(c->fP, q, f.by_P);
        set_tensor(c->Ma, q, m.by_P_accel);
        set_tensor(c->Mu, q, m.by_u);
        set_tensor(c->MP, q, m.by_P);
    }
    SourceTerms src;
    const auto tu = tau_u_, tP = tau_P_;
    src.f = [c, tu, tP](double t, VectorField& out) {
        const TimeJet a = tu(t), b = tP(t);
        auto o = out.raw();
        const auto x = c->fa.raw(), y = c->fu.raw(), z = c->fP.raw();
        for (std::size_t q = 0; q < o.size(); ++q) o[q] = a.accel * x[q] + a.value * y[q] + b.value * z[q];
    };
    src.M = [c, tu, tP](double t, TensorField& out) {
        const TimeJet a = tu(t), b = tP(t);
        auto o = out.raw();
        const auto x = c->Ma.raw(), y = c->Mu.raw(), z = c->MP.raw();
        for (std::size_t q = 0; q < o.size(); ++q) o[q] = b.accel * x[q] + a.value * y[q] + b.value * z[q];
    };
    return src;
}

BoundaryData ManufacturedCase::boundary_data() const {
    BoundaryData bc;
    const ManufacturedCase self = *this;
    bc.g = [self](const NodeIndex&, const Point& x, double t) { return self.u(x, t); };
    bc.g_t = [self](const NodeIndex&, const Point& x, double t) { return self.u_t(x, t); };
    bc.G_ext = [self](const NodeIndex&, const Point& x, double t) { return self.P(x, t); };
    bc.G_ext_t = [self](const NodeIndex&, const Point& x, double t) { return self.P_t(x, t); };
    return bc;
}

std::vector<std::string> manufactured_case_names() { return {"poly2", "trig1", "trig-mixed", "zero"}; }

ManufacturedCase manufactured_case(const std::string& name) {
    if (name == "trig1") {
        return ManufacturedCase(
            name, [](double t) { return cosine(kTrigOmega, t); }, [](double t) { return cosine(kTrigOmega, t); },
            trig_u, trig_P);
    }
    if (name == "trig-mixed") {
        return ManufacturedCase(
            name, [](double t) { return cosine(kTrigOmega, t); }, [](double t) { return cosine(kTrigOmega, t); },
            trig_u, [](const Point& x) {
                auto P = trig_P(x);
                P[0] = P[0] + scaled(0.5, product(kink(x[0]), sin_pi(x[1]), sin_pi(x[2])));
                return P;
            });
    }
    if (name == "poly2") {
        // At most linear in each coordinate, degree <= 2 overall, with nonzero traces.
        return ManufacturedCase(
            name, [](double t) { return TimeJet{1.0 + t + 0.5 * t * t, 1.0 + t, 1.0}; },
            [](double t) { return TimeJet{0.5 - t + 0.75 * t * t, -1.0 + 1.5 * t, 1.5}; },
            [](const Point& x) {
                return ManufacturedCase::UJets{product(linear(1.0, 0.5, x[0]), linear(0.5, -1.0, x[1]), one()),
                             product(one(), linear(0.2, 1.0, x[1]), linear(1.0, 0.3, x[2])),
                             product(linear(-0.4, 1.0, x[0]), one(), linear(0.1, -0.6, x[2]))};
            },
            [](const Point& x) {
                ManufacturedCase::PJets P;
                for (std::size_t q = 0; q < 9; ++q) {
                    const double a = 0.1 * static_cast<double>(q) - 0.3, b = 0.25 - 0.05 * static_cast<double>(q);
                    const std::size_t ax = q % 3, ay = (q / 3 + 1) % 3;
                    Factor f[3] = {one(), one(), one()};
                    f[ax] = linear(a, 1.0, x[ax]);
                    if (ay != ax) f[ay] = linear(1.0, b, x[ay]);
                    P[q] = product(f[0], f[1], f[2]);
                }
                return P;
            });
    }
    if (name == "zero") {
        return ManufacturedCase(
            name, [](double) { return TimeJet{}; }, [](double) { return TimeJet{}; },
            [](const Point&) { return ManufacturedCase::UJets{}; }, [](const Point&) { return ManufacturedCase::PJets{}; });
    }
    std::ostringstream os;
    os << "unknown manufactured case '" << name << "' (catalog:";
    for (const auto& n : manufactured_case_names()) os << ' ' << n;
    os << ')';
    throw std::invalid_argument(os.str());
}

const OrderFit& ConvergenceStudy::fit(const std::string& metric) const {
    for (const auto& f : fits)
        if (f.metric == metric) return f;
    throw std::out_of_range("no fit for metric " + metric);
}

double fit_order(const std::vector<double>& h, const std::vector<double>& err) {
    if (h.size() != err.size() || h.size() < 2) throw std::invalid_argument("fit_order: need at least two points");
    double mx = 0.0, my = 0.0;
    const auto n = static_cast<double>(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        mx += std::log(h[i]) / n;
        my += std::log(err[i]) / n;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double dx = std::log(h[i]) - mx;
        sxy += dx * (std::log(err[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

OrderFit fit_errors(std::string metric, const std::vector<double>& h, const std::vector<double>& err, double floor) {
    if (h.size() != err.size()) throw std::invalid_argument("fit_errors: size mismatch");
    OrderFit f;
    f.metric = std::move(metric);
    for (double e : err) f.max_error = std::max(f.max_error, e);
    f.at_floor = f.max_error < floor;
    if (f.at_floor) return f;
    for (std::size_t i = 1; i < err.size(); ++i)
        if (!(err[i] < err[i - 1])) f.non_monotone = true;
    if (!f.non_monotone && err.size() >= 2) f.order = fit_order(h, err);
    return f;
}

ConvergenceStudy convergence_study(const ManufacturedCase& mc, const std::vector<int>& resolutions, double T,
                                   const ConvergenceOptions& options) {
    if (resolutions.empty()) throw std::invalid_argument("convergence_study: no resolutions");
    for (std::size_t i = 1; i < resolutions.size(); ++i)
        if (resolutions[i] <= resolutions[i - 1])
            throw std::invalid_argument("convergence_study: resolutions must be strictly increasing");
    if (!(T >= 0.0)) throw std::invalid_argument("convergence_study: T must be >= 0");
    require_valid(options.parameters);

    ConvergenceStudy study;
    study.case_name = mc.name();
    study.T = T;
    for (std::size_t a = 0; a < 3; ++a) {
        study.interior.lo[a] = 0.5 - 0.5 * options.interior_fraction;
        study.interior.hi[a] = 0.5 + 0.5 * options.interior_fraction;
    }

    if (options.threads < 1) throw std::invalid_argument("convergence_study: threads must be >= 1");

    auto run_one = [&](int N) {
        const auto g = CartesianGrid::unit_cube(N);
        const NodeBox inner = aligned_node_box(g, study.interior);
        RunSettings rs;
        rs.T = T;
        rs.cfl_safety = options.cfl_safety;
        rs.record_every = std::numeric_limits<std::size_t>::max();
        SimulationState final_state;
        std::size_t final_step = 0;
        rs.on_record = [&](const SimulationState& s, std::size_t step) {
            final_state = s;
            final_step = step;
        };
        const auto traj =
            run_simulation(mc.exact_state(g, 0.0), options.parameters, mc.sources(options.parameters, g),
                           mc.boundary_data(), rs);

        const auto exact = mc.exact_state(g, final_state.time);
        const VectorField eu = final_state.u - exact.u;
        const TensorField eP = final_state.P - exact.P;
        TensorField ec = curl_tensor(final_state.P, Closure::summation_by_parts);
        for (std::size_t q = 0; q < g.node_count(); ++q)
            set_tensor(ec, q, get_tensor(ec, q) - mc.curl_P(g.position(q), final_state.time));

        ConvergenceRow row;
        row.N = N;
        row.h = g.spacing()[0];
        row.dt = traj.dt;
        row.steps = final_step;
        row.u_interior = std::sqrt(l2_norm_squared(eu, nullptr, inner));
        row.u_global = std::sqrt(l2_norm_squared(eu));
        row.P_interior = std::sqrt(l2_norm_squared(eP, nullptr, inner));
        row.P_global = std::sqrt(l2_norm_squared(eP));
        row.curl_P_global = std::sqrt(l2_norm_squared(ec));
        return row;
    };

    // Resolutions are independent; each worker fills its own slot.
    study.rows.resize(resolutions.size());
    const std::size_t workers = std::min<std::size_t>(options.threads, resolutions.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < resolutions.size(); ++i) study.rows[i] = run_one(resolutions[i]);
    } else {
        std::vector<std::exception_ptr> errors(workers);
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < resolutions.size(); i += workers) study.rows[i] = run_one(resolutions[i]);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        for (auto& t : pool) t.join();
        for (const auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    const std::pair<const char*, double ConvergenceRow::*> metrics[] = {
        {"u_interior", &ConvergenceRow::u_interior}, {"u_global", &ConvergenceRow::u_global},
        {"P_interior", &ConvergenceRow::P_interior}, {"P_global", &ConvergenceRow::P_global},
        {"curl_P_global", &ConvergenceRow::curl_P_global}};
    for (const auto& [name, member] : metrics) {
        std::vector<double> h, e;
        for (const auto& r : study.rows) {
            h.push_back(r.h);
            e.push_back(r.*member);
        }
        study.fits.push_back(fit_errors(name, h, e, options.floor));
    }
    return study;
}

}  // namespace relaxmm
