#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "relaxmm/dynamics.hpp"
#include "relaxmm/regularity.hpp"

namespace relaxmm {

/// Value, gradient and Hessian of a scalar function of x.
struct SpatialJet {
    double value = 0.0;
    Vec3 grad{};
    Tensor3 hess;
};

/// Value and first two derivatives of a function of t.
struct TimeJet {
    double value = 0.0;
    double rate = 0.0;
    double accel = 0.0;
};

/// Manufactured solution u*(x, t) = tau_u(t) phi_u(x), P*(x, t) = tau_P(t) phi_P(x)
/// with hand-coded derivative jets. Sources follow from the equations of motion:
///   f = u*_tt - Div sigma(grad u* - P*)
///   M = P*_tt - sigma(grad u* - P*) + micro_stress(P*) + mu_micro L_c^2 Curl Curl P*
/// Boundary data are the traces of u* and P*.
class ManufacturedCase {
public:
    using UJets = std::array<SpatialJet, 3>;
    using PJets = std::array<SpatialJet, 9>;

    ManufacturedCase(std::string name, std::function<TimeJet(double)> tau_u, std::function<TimeJet(double)> tau_P,
                     std::function<UJets(const Point&)> phi_u, std::function<PJets(const Point&)> phi_P);

    const std::string& name() const { return name_; }

    Vec3 u(const Point& x, double t) const;
    Vec3 u_t(const Point& x, double t) const;
    Vec3 u_tt(const Point& x, double t) const;
    Tensor3 P(const Point& x, double t) const;
    Tensor3 P_t(const Point& x, double t) const;
    Tensor3 P_tt(const Point& x, double t) const;
    Tensor3 grad_u(const Point& x, double t) const;
    Tensor3 curl_P(const Point& x, double t) const;

    Vec3 body_force(const MaterialParameters& p, const Point& x, double t) const;
    Tensor3 body_moment(const MaterialParameters& p, const Point& x, double t) const;

    SimulationState exact_state(const CartesianGrid& g, double t) const;

    /// Sources on a grid. The spatial factors are sampled once; each call
    /// combines them with the time factors.
    SourceTerms sources(const MaterialParameters& p, const CartesianGrid& g) const;

    BoundaryData boundary_data() const;

private:
    struct ForceParts {
        Vec3 by_u_accel{};  // multiplies tau_u''
        Vec3 by_u{};        // multiplies tau_u
        Vec3 by_P{};        // multiplies tau_P
    };
    struct MomentParts {
        Tensor3 by_P_accel;
        Tensor3 by_u;
        Tensor3 by_P;
    };
    ForceParts force_parts(const MaterialParameters& p, const Point& x) const;
    MomentParts moment_parts(const MaterialParameters& p, const Point& x) const;

    std::string name_;
    std::function<TimeJet(double)> tau_u_;
    std::function<TimeJet(double)> tau_P_;
    std::function<UJets(const Point&)> phi_u_;
    std::function<PJets(const Point&)> phi_P_;
};

/// Catalog: "poly2", "trig1", "trig-mixed", "zero". Throws std::invalid_argument
/// naming the catalog for any other name.
ManufacturedCase manufactured_case(const std::string& name);
std::vector<std::string> manufactured_case_names();

struct ConvergenceRow {
    int N = 0;
    double h = 0.0;
    double dt = 0.0;
    std::size_t steps = 0;
    double u_interior = 0.0;
    double u_global = 0.0;
    double P_interior = 0.0;
    double P_global = 0.0;
    double curl_P_global = 0.0;
};

/// Least-squares order of one error column.
struct OrderFit {
    std::string metric;
    std::optional<double> order;  // absent when at the floor or non-monotone
    bool at_floor = false;
    bool non_monotone = false;
    double max_error = 0.0;
};

struct ConvergenceStudy {
    std::string case_name;
    double T = 0.0;
    Box interior;
    std::vector<ConvergenceRow> rows;
    std::vector<OrderFit> fits;

    const OrderFit& fit(const std::string& metric) const;
};

struct ConvergenceOptions {
    double cfl_safety = 0.9;
    /// Errors below this are reported as the floor and not fitted.
    double floor = 1e-10;
    MaterialParameters parameters = kReferenceParameters;
    /// Fraction of the unit edge covered by the central interior box.
    double interior_fraction = 0.5;
    /// Resolutions run concurrently on up to this many threads.
    unsigned threads = 1;
};

/// Runs the case on unit cubes with N nodes per axis for each N (strictly
/// increasing) up to time T and measures L2 errors at T against the closed form.
ConvergenceStudy convergence_study(const ManufacturedCase& mc, const std::vector<int>& resolutions, double T,
                                   const ConvergenceOptions& options = {});

/// Slope of log(err) against log(h), so that err ~ h^order.
double fit_order(const std::vector<double>& h, const std::vector<double>& err);

/// Fit for one column, h decreasing along the rows. Errors all below floor are
/// reported as the floor; a sequence that fails to decrease is flagged and not fitted.
OrderFit fit_errors(std::string metric, const std::vector<double>& h, const std::vector<double>& err, double floor);

}  // namespace relaxmm
