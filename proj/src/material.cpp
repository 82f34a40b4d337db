#include "relaxmm/material.hpp"

#include <sstream>

namespace relaxmm {

std::string ParameterReport::summary() const {
    if (ok()) return "valid";
    std::ostringstream os;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i) os << "; ";
        os << "violated " << violations[i].constraint << " (lhs = " << violations[i].value << ")";
    }
    return os.str();
}

ParameterReport validate_parameters(const MaterialParameters& p) {
    ParameterReport r;
    auto need = [&](bool holds, const char* field, const char* constraint, double lhs) {
        if (!holds) r.violations.push_back({field, constraint, lhs});
    };
    // The negated comparisons also reject NaN.
    need(p.mu_e > 0.0, "mu_e", "mu_e > 0", p.mu_e);
    const double bulk_e = 2.0 * p.mu_e + 3.0 * p.lambda_e;
    need(bulk_e > 0.0, "lambda_e", "2*mu_e+3*lambda_e > 0", bulk_e);
    need(p.mu_c >= 0.0, "mu_c", "mu_c >= 0", p.mu_c);
    need(p.mu_micro > 0.0, "mu_micro", "mu_micro > 0", p.mu_micro);
    const double bulk_micro = 2.0 * p.mu_micro + 3.0 * p.lambda_micro;
    need(bulk_micro > 0.0, "lambda_micro", "2*mu_micro+3*lambda_micro > 0", bulk_micro);
    need(p.L_c > 0.0, "L_c", "L_c > 0", p.L_c);
    return r;
}

InvalidParameters::InvalidParameters(ParameterReport report)
    : std::invalid_argument("invalid material parameters: " + report.summary()), report_(std::move(report)) {}

const MaterialParameters& require_valid(const MaterialParameters& p) {
    auto r = validate_parameters(p);
    if (!r.ok()) throw InvalidParameters(std::move(r));
    return p;
}

Tensor3 cauchy_stress(const MaterialParameters& p, const Tensor3& e) {
    Tensor3 s;
    const double tr = p.lambda_e * trace(e);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            // 2 mu_e sym + 2 mu_c skew, expanded per entry
            s(i, j) = (p.mu_e + p.mu_c) * e(i, j) + (p.mu_e - p.mu_c) * e(j, i);
        }
        s(i, i) += tr;
    }
    return s;
}

Tensor3 micro_stress(const MaterialParameters& p, const Tensor3& P) {
    Tensor3 s;
    const double tr = p.lambda_micro * trace(P);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) s(i, j) = p.mu_micro * (P(i, j) + P(j, i));
        s(i, i) += tr;
    }
    return s;
}

LocalEnergy local_energy(const MaterialParameters& p, const Tensor3& e, const Tensor3& P) {
    LocalEnergy w;
    const double tr_e = trace(e);
    const double tr_p = trace(P);
    w.elastic_sym = p.mu_e * norm_squared(dev(sym(e)));
    w.elastic_trace = (2.0 * p.mu_e + 3.0 * p.lambda_e) / 6.0 * tr_e * tr_e;
    w.elastic_skew = p.mu_c * norm_squared(skew(e));
    w.micro_sym = p.mu_micro * norm_squared(dev(sym(P)));
    w.micro_trace = (2.0 * p.mu_micro + 3.0 * p.lambda_micro) / 6.0 * tr_p * tr_p;
    return w;
}

}  // namespace relaxmm
