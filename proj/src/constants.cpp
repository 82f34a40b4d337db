#include "relaxmm/constants.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "relaxmm/dynamics.hpp"
#include "relaxmm/energy.hpp"
#include "relaxmm/initial_data.hpp"
#include "relaxmm/lobpcg.hpp"
#include "relaxmm/quadrature.hpp"

namespace relaxmm {

namespace {

template <std::size_t NC>
void scale_by_weights(NodeField<NC>& f, const ScalarField& w) {
    for (std::size_t c = 0; c < NC; ++c) {
        auto d = f.comp(c);
        const auto ww = w.comp(0);
        for (std::size_t q = 0; q < d.size(); ++q) d[q] *= ww[q];
    }
}

template <std::size_t NC>
void to_fields(const Eigen::Ref<const Eigen::VectorXd>& x, NodeField<NC>& f, Eigen::Index offset) {
    auto d = f.raw();
    for (std::size_t q = 0; q < d.size(); ++q) d[q] = x(offset + static_cast<Eigen::Index>(q));
}

template <std::size_t NC>
void from_fields(const NodeField<NC>& f, Eigen::Ref<Eigen::VectorXd> x, Eigen::Index offset) {
    const auto d = f.raw();
    for (std::size_t q = 0; q < d.size(); ++q) x(offset + static_cast<Eigen::Index>(q)) = d[q];
}

bool default_refine(const CartesianGrid& g, const ConstantOptions& o) {
    return o.refine.value_or(g.node_count() <= 729);
}

void check_options(const CartesianGrid& g, const ConstantOptions& o) {
    if (g.periodic()) throw std::invalid_argument("constant estimation needs a bounded grid");
    if (o.trials == 0) throw std::invalid_argument("constant estimation needs at least one trial field");
    if (o.block < 1) throw std::invalid_argument("refinement block size must be >= 1");
    if (o.max_iterations < 1 || o.sweep_iterations < 1) throw std::invalid_argument("iteration limits must be >= 1");
}

// Indices of the `count` best trials (ascending for minimize, descending otherwise).
std::vector<std::size_t> best_trials(const std::vector<double>& q, std::size_t count, bool minimize) {
    std::vector<std::size_t> idx(q.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return minimize ? q[a] < q[b] : q[a] > q[b]; });
    idx.resize(std::min(count, idx.size()));
    return idx;
}

}  // namespace

double coercivity_quotient(const VectorField& u, const TensorField& P, const MaterialParameters& p, Closure closure) {
    u.check_same_grid(P);
    SimulationState s(u.grid());
    s.u = u;
    s.P = P;
    const double num = total_energy(s, p, nullptr, closure).potential();
    const double den = l2_norm_squared(gradient(u, closure)) + l2_norm_squared(P) + l2_norm_squared(curl_tensor(P, closure));
    return den > 0.0 ? num / den : INFINITY;
}

double gaffney_quotient(const VectorField& v, Closure closure) {
    const double g = std::sqrt(l2_norm_squared(gradient(v, closure)));
    const double den = std::sqrt(l2_norm_squared(curl_vector(v, closure))) +
                       std::sqrt(l2_norm_squared(div_vector(v, closure))) + std::sqrt(l2_norm_squared(v));
    return den > 0.0 ? g / den : 0.0;
}

void clear_normal_components(VectorField& v) {
    const auto& g = v.grid();
    if (g.periodic()) return;
    for (std::size_t q = 0; q < g.node_count(); ++q) {
        const NodeIndex n = g.node(q);
        for (int i = 0; i < 3; ++i)
            if (g.on_axis_face(n, i)) v(static_cast<std::size_t>(i), q) = 0.0;
    }
}

ConstantEstimate coercivity_constant(const CartesianGrid& g, const MaterialParameters& p, const ConstantOptions& o) {
    require_valid(p);
    check_options(g, o);
    const Constraints cons(g);
    const ScalarField W = quadrature_weights(g);
    const auto N = static_cast<Eigen::Index>(g.node_count());
    const Eigen::Index n = 12 * N;

    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Eigen::MatrixXd trials(n, static_cast<Eigen::Index>(o.trials));
    std::vector<double> q(o.trials);
    for (std::size_t t = 0; t < o.trials; ++t) {
        SimulationState s(g);
        if (t % 2 == 0) {
            s = random_band_limited_state(g, 3, o.seed + t);
        } else {
            for (auto& v : s.u.raw()) v = uni(rng);
            for (auto& v : s.P.raw()) v = uni(rng);
            cons.clear(s.u);
            cons.clear(s.P);
        }
        q[t] = coercivity_quotient(s.u, s.P, p, o.closure);
        from_fields(s.u, trials.col(static_cast<Eigen::Index>(t)), 0);
        from_fields(s.P, trials.col(static_cast<Eigen::Index>(t)), 3 * N);
    }

    ConstantEstimate est;
    est.trials = o.trials;
    est.sampled = *std::min_element(q.begin(), q.end());
    est.value = est.sampled;
    if (!default_refine(g, o)) return est;

    // A x = grad V = -W rhs(x) at free dofs; B x = grad of the denominator.
    const BlockOperator A = [&](const Eigen::MatrixXd& X, Eigen::MatrixXd& Y) {
        SimulationState s(g);
        Acceleration acc;
        for (Eigen::Index c = 0; c < X.cols(); ++c) {
            to_fields(X.col(c), s.u, 0);
            to_fields(X.col(c), s.P, 3 * N);
            rhs(s, p, {}, 0.0, acc, o.closure);
            acc.a_u *= -1.0;
            acc.a_P *= -1.0;
            scale_by_weights(acc.a_u, W);
            scale_by_weights(acc.a_P, W);
            cons.clear(acc.a_u);
            cons.clear(acc.a_P);
            from_fields(acc.a_u, Y.col(c), 0);
            from_fields(acc.a_P, Y.col(c), 3 * N);
        }
    };
    const BlockOperator B = [&](const Eigen::MatrixXd& X, Eigen::MatrixXd& Y) {
        VectorField u(g);
        TensorField P(g);
        for (Eigen::Index c = 0; c < X.cols(); ++c) {
            to_fields(X.col(c), u, 0);
            to_fields(X.col(c), P, 3 * N);
            TensorField G = gradient(u, o.closure);
            scale_by_weights(G, W);
            VectorField bu = gradient_transpose(G, o.closure);
            TensorField C = curl_tensor(P, o.closure);
            scale_by_weights(C, W);
            TensorField bP = curl_tensor_transpose(C, o.closure);
            TensorField wP = P;
            scale_by_weights(wP, W);
            bP += wP;
            bu *= 2.0;
            bP *= 2.0;
            cons.clear(bu);
            cons.clear(bP);
            from_fields(bu, Y.col(c), 0);
            from_fields(bP, Y.col(c), 3 * N);
        }
    };
    const auto pick = best_trials(q, static_cast<std::size_t>(o.block), true);
    Eigen::MatrixXd X0(n, static_cast<Eigen::Index>(pick.size()));
    for (std::size_t j = 0; j < pick.size(); ++j)
        X0.col(static_cast<Eigen::Index>(j)) = trials.col(static_cast<Eigen::Index>(pick[j]));
    LobpcgOptions lo;
    lo.max_iterations = o.max_iterations;
    lo.tolerance = o.tolerance;
    const auto r = lobpcg(A, B, X0, lo);
    est.refined = r.values(0);
    est.iterations = r.iterations;
    est.converged = r.converged;
    est.residual = r.residuals(0);
    est.value = std::min(est.sampled, *est.refined);
    return est;
}

GaffneyEstimate gaffney_constant(const CartesianGrid& g, const ConstantOptions& o) {
    check_options(g, o);
    const ScalarField W = quadrature_weights(g);
    const auto N = static_cast<Eigen::Index>(g.node_count());
    const Eigen::Index n = 3 * N;
    constexpr double pi = std::numbers::pi;

    auto unit_coord = [&](const Point& x, int k) {
        return (x[static_cast<std::size_t>(k)] - g.origin()[static_cast<std::size_t>(k)]) /
               g.lengths()[static_cast<std::size_t>(k)];
    };
    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Eigen::MatrixXd trials(n, static_cast<Eigen::Index>(o.trials));
    std::vector<double> q(o.trials);
    for (std::size_t t = 0; t < o.trials; ++t) {
        VectorField v(g);
        if (t % 3 == 0) {
            // v_i ~ sin(m_i pi s_i) prod_{k != i} cos(m_k pi s_k), modes up to 3
            for (int i = 0; i < 3; ++i)
                for (int a = 1; a <= 3; ++a)
                    for (int b = 0; b <= 3; ++b)
                        for (int c = 0; c <= 3; ++c) {
                            const double coef = uni(rng) / (a * a + b * b + c * c);
                            int mm[3];
                            mm[i] = a;
                            mm[(i + 1) % 3] = b;
                            mm[(i + 2) % 3] = c;
                            for (std::size_t qn = 0; qn < g.node_count(); ++qn) {
                                const Point x = g.position(qn);
                                double val = coef;
                                for (int k = 0; k < 3; ++k)
                                    val *= k == i ? std::sin(mm[k] * pi * unit_coord(x, k)) : std::cos(mm[k] * pi * unit_coord(x, k));
                                v(static_cast<std::size_t>(i), qn) += val;
                            }
                        }
        } else if (t % 3 == 1) {
            // gradient of a cosine series: curl free, normal component zero on the faces
            for (int a = 0; a <= 3; ++a)
                for (int b = 0; b <= 3; ++b)
                    for (int c = 0; c <= 3; ++c) {
                        if (a + b + c == 0) continue;
                        const double coef = uni(rng) / (a * a + b * b + c * c);
                        const int mm[3] = {a, b, c};
                        for (std::size_t qn = 0; qn < g.node_count(); ++qn) {
                            const Point x = g.position(qn);
                            for (int i = 0; i < 3; ++i) {
                                double val = -coef * mm[i] * pi / g.lengths()[static_cast<std::size_t>(i)];
                                for (int k = 0; k < 3; ++k)
                                    val *= k == i ? std::sin(mm[k] * pi * unit_coord(x, k)) : std::cos(mm[k] * pi * unit_coord(x, k));
                                v(static_cast<std::size_t>(i), qn) += val;
                            }
                        }
                    }
        } else {
            for (auto& x : v.raw()) x = uni(rng);
        }
        clear_normal_components(v);
        q[t] = gaffney_quotient(v, o.closure);
        from_fields(v, trials.col(static_cast<Eigen::Index>(t)), 0);
    }

    GaffneyEstimate est;
    est.trials = o.trials;
    est.sampled = *std::max_element(q.begin(), q.end());
    est.value = est.sampled;
    if (!default_refine(g, o)) return est;

    // (|curl v| + |div v| + |v|)^2 = min over simplex weights w of sum_k |b_k|^2 / w_k, so the
    // squared constant is the max over w of the top eigenvalue of (A, B_w). Iterating
    // w <- (|curl v|, |div v|, |v|) / sum on the top Ritz vector never lowers that eigenvalue.
    const BlockOperator A = [&](const Eigen::MatrixXd& X, Eigen::MatrixXd& Y) {
        VectorField v(g);
        for (Eigen::Index c = 0; c < X.cols(); ++c) {
            to_fields(X.col(c), v, 0);
            TensorField G = gradient(v, o.closure);
            scale_by_weights(G, W);
            VectorField out = gradient_transpose(G, o.closure);
            out *= 2.0;
            clear_normal_components(out);
            from_fields(out, Y.col(c), 0);
        }
    };
    auto weighted_B = [&](std::array<double, 3> w) -> BlockOperator {
        return [&, w](const Eigen::MatrixXd& X, Eigen::MatrixXd& Y) {
            VectorField v(g);
            for (Eigen::Index c = 0; c < X.cols(); ++c) {
                to_fields(X.col(c), v, 0);
                VectorField cv = curl_vector(v, o.closure);
                scale_by_weights(cv, W);
                ScalarField dv = div_vector(v, o.closure);
                scale_by_weights(dv, W);
                VectorField out = curl_vector_transpose(cv, o.closure);
                out *= 1.0 / w[0];
                VectorField dt = div_vector_transpose(dv, o.closure);
                dt *= 1.0 / w[1];
                out += dt;
                VectorField wv = v;
                scale_by_weights(wv, W);
                wv *= 1.0 / w[2];
                out += wv;
                out *= 2.0;
                clear_normal_components(out);
                from_fields(out, Y.col(c), 0);
            }
        };
    };
    auto norms = [&](const VectorField& v) {
        return std::array<double, 3>{std::sqrt(l2_norm_squared(curl_vector(v, o.closure))),
                                     std::sqrt(l2_norm_squared(div_vector(v, o.closure))),
                                     std::sqrt(l2_norm_squared(v))};
    };

    LobpcgOptions lo;
    lo.max_iterations = o.max_iterations;
    lo.tolerance = o.tolerance;
    lo.largest = true;
    const Eigen::Index k = std::min<Eigen::Index>(o.block, n / 3);

    auto start_block = [&](const std::vector<std::size_t>& pick) {
        Eigen::MatrixXd X(n, static_cast<Eigen::Index>(pick.size()));
        for (std::size_t j = 0; j < pick.size(); ++j)
            X.col(static_cast<Eigen::Index>(j)) = trials.col(static_cast<Eigen::Index>(pick[j]));
        return X;
    };
    const auto pick = best_trials(q, static_cast<std::size_t>(k), false);

    double best = 0.0;
    bool all_converged = true;
    VectorField v(g);
    constexpr double kWeightFloor = 1e-4;
    auto ascend = [&](std::array<double, 3> w, Eigen::MatrixXd X, bool record_quadratic) {
        double last = -1.0;
        for (int sweep = 0; sweep < 20; ++sweep) {
            LobpcgOptions so = lo;
            if (sweep > 0) so.max_iterations = std::min(o.max_iterations, o.sweep_iterations);
            const auto r = lobpcg(A, weighted_B(w), X, so);
            est.iterations += r.iterations;
            est.residual = std::max(est.residual, r.residuals(0));
            all_converged = all_converged && r.converged;
            // equal weights give a third of the quadratic-quotient pencil
            if (record_quadratic && sweep == 0) est.quadratic_constant = std::sqrt(std::max(3.0 * r.values(0), 0.0));
            for (Eigen::Index c = 0; c < r.vectors.cols(); ++c) {
                to_fields(r.vectors.col(c), v, 0);
                best = std::max(best, gaffney_quotient(v, o.closure));
            }
            to_fields(r.vectors.col(0), v, 0);
            const auto b = norms(v);
            const double sum = b[0] + b[1] + b[2];
            if (!(sum > 0.0)) break;
            // weights stay inside the simplex; the floor costs ~1e-4 relative when the
            // maximizer is divergence or curl free
            for (int i = 0; i < 3; ++i) w[static_cast<std::size_t>(i)] = std::max(b[static_cast<std::size_t>(i)] / sum, kWeightFloor);
            X = r.vectors;
            if (last > 0.0 && r.values(0) <= last * (1.0 + 1e-5)) break;
            last = r.values(0);
        }
    };
    // the plain quadratic pencil first (equal weights), then starts favouring each term
    ascend({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, start_block(pick), true);
    for (const auto& w0 : {std::array<double, 3>{0.1, 0.8, 0.1}, std::array<double, 3>{0.8, 0.1, 0.1}})
        ascend(w0, start_block(pick), false);

    est.converged = all_converged;
    est.refined = best;
    est.value = std::max(est.sampled, best);
    return est;
}

}  // namespace relaxmm
