#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "relaxmm/tensor.hpp"

namespace relaxmm {

/// Isotropic constitutive constants of the relaxed micromorphic model plus the
/// characteristic length. Inertia densities are fixed to one.
struct MaterialParameters {
    double mu_e = 1.0;
    double lambda_e = 0.0;
    double mu_c = 0.0;
    double mu_micro = 1.0;
    double lambda_micro = 0.0;
    double L_c = 1.0;

    /// mu_micro * L_c^2, the coefficient of the curvature term.
    double curvature_modulus() const { return mu_micro * L_c * L_c; }

    /// Every modulus multiplied by s; L_c is left alone.
    MaterialParameters scaled(double s) const {
        return {s * mu_e, s * lambda_e, s * mu_c, s * mu_micro, s * lambda_micro, L_c};
    }
};

/// The reference set used throughout the tests and the default configuration.
inline constexpr MaterialParameters kReferenceParameters{1.0, 0.0, 0.0, 1.0, 0.0, 1.0};

struct ParameterViolation {
    std::string field;       // offending parameter, e.g. "mu_e"
    std::string constraint;  // e.g. "2*mu_e+3*lambda_e > 0"
    double value = 0.0;      // left-hand side that failed
};

struct ParameterReport {
    std::vector<ParameterViolation> violations;
    bool ok() const { return violations.empty(); }
    std::string summary() const;
};

/// Checks mu_e > 0, 2 mu_e + 3 lambda_e > 0, mu_c >= 0, mu_micro > 0,
/// 2 mu_micro + 3 lambda_micro > 0 and L_c > 0. Every violated inequality is listed.
ParameterReport validate_parameters(const MaterialParameters& p);

class InvalidParameters : public std::invalid_argument {
public:
    explicit InvalidParameters(ParameterReport report);
    const ParameterReport& report() const { return report_; }

private:
    ParameterReport report_;
};

/// Throws InvalidParameters when validate_parameters rejects p.
const MaterialParameters& require_valid(const MaterialParameters& p);

/// sigma(E) = 2 mu_e sym E + 2 mu_c skew E + lambda_e tr(E) Id, with E = grad u - P.
Tensor3 cauchy_stress(const MaterialParameters& p, const Tensor3& e);

/// 2 mu_micro sym P + lambda_micro tr(P) Id.
Tensor3 micro_stress(const MaterialParameters& p, const Tensor3& P);

/// Pointwise potential energy density (excluding the curvature term), grouped
/// into the parts reported by EnergyBreakdown.
struct LocalEnergy {
    double elastic_sym = 0.0;    // mu_e |dev sym E|^2
    double elastic_trace = 0.0;  // (2 mu_e + 3 lambda_e)/6 tr(E)^2
    double elastic_skew = 0.0;   // mu_c |skew E|^2
    double micro_sym = 0.0;      // mu_micro |dev sym P|^2
    double micro_trace = 0.0;    // (2 mu_micro + 3 lambda_micro)/6 tr(P)^2

    double total() const { return elastic_sym + elastic_trace + elastic_skew + micro_sym + micro_trace; }
};

LocalEnergy local_energy(const MaterialParameters& p, const Tensor3& e, const Tensor3& P);

}  // namespace relaxmm
