#pragma once

#include <cstddef>
#include <cstdint>

#include "relaxmm/operators.hpp"

namespace relaxmm {

/// Worst relative residuals of the discrete vector-calculus identities over a
/// batch of random fields (entries uniform in [-1, 1]).
struct IdentityReport {
    std::size_t fields = 0;
    double div_curl = 0.0;   // max ||Div Curl P|| / ||P||
    double curl_grad = 0.0;  // max ||Curl grad u|| / ||u||
    double commute = 0.0;    // max over axis pairs ||D_a D_b f - D_b D_a f|| / ||f||
    bool ok(double tol = 1e-12) const { return div_curl <= tol && curl_grad <= tol && commute <= tol; }
};

IdentityReport mimetic_identity_check(const CartesianGrid& g, std::size_t fields, std::uint64_t seed,
                                      Closure closure = Closure::summation_by_parts);

}  // namespace relaxmm
