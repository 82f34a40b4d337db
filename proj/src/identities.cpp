#include "relaxmm/identities.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "relaxmm/quadrature.hpp"

namespace relaxmm {

IdentityReport mimetic_identity_check(const CartesianGrid& g, std::size_t fields, std::uint64_t seed, Closure closure) {
    if (fields == 0) throw std::invalid_argument("identity check needs at least one field");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    IdentityReport r;
    r.fields = fields;
    TensorField P(g), C(g);
    VectorField u(g), div(g);
    TensorField G(g);
    for (std::size_t k = 0; k < fields; ++k) {
        for (auto& v : P.raw()) v = d(rng);
        for (auto& v : u.raw()) v = d(rng);
        curl_tensor(P, C, closure);
        div_tensor(C, div, closure);
        r.div_curl = std::max(r.div_curl, std::sqrt(l2_norm_squared(div) / l2_norm_squared(P)));
        gradient(u, G, closure);
        curl_tensor(G, C, closure);
        r.curl_grad = std::max(r.curl_grad, std::sqrt(l2_norm_squared(C) / l2_norm_squared(u)));

        ScalarField f(g);
        for (std::size_t q = 0; q < g.node_count(); ++q) f(0, q) = u(0, q);
        const double nf = std::sqrt(l2_norm_squared(f));
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b) {
                ScalarField ab = axis_derivative(axis_derivative(f, b, closure), a, closure);
                ab -= axis_derivative(axis_derivative(f, a, closure), b, closure);
                r.commute = std::max(r.commute, std::sqrt(l2_norm_squared(ab)) / nf);
            }
    }
    return r;
}

}  // namespace relaxmm
