#pragma once

// Coordinate changes, prevectors at a point, and how both move between charts.

#include "prevec/fields.hpp"
#include "prevec/geometry.hpp"
#include "prevec/order.hpp"

#include <functional>
#include <optional>

namespace prevec {

/// Pair (a, x) of points at distance of order lambda.
struct Prevector {
    Vec base;
    Vec tip;
};

struct ScalarFunction {
    ScalarMap f;
    std::optional<Box> domain;

    /// Throws DomainExit outside the domain.
    double operator()(const Vec& a) const;
};

struct SmoothMap {
    VectorMap f;
    std::optional<Box> domain;

    /// Throws DomainExit outside the domain.
    Vec operator()(const Vec& a) const;
};

using JacobianMap = std::function<Mat(const Vec&)>;

/// Change of coordinates phi: U -> W with its inverse. Without a closed-form
/// Jacobian, J is taken by central differences with step `fd_step`
/// (lambda^2 of the scale given at construction).
class Transition {
public:
    Transition(VectorMap forward, VectorMap inverse, Box domain, std::optional<Box> codomain, const Scale& scale,
               std::optional<JacobianMap> jacobian = std::nullopt);

    static Transition identity(const Box& domain, const Scale& scale);

    /// phi(a); throws DomainExit if a is outside the domain.
    [[nodiscard]] Vec forward(const Vec& a) const;
    /// phi^-1(b); throws DomainExit if b is outside the codomain (when set).
    [[nodiscard]] Vec inverse(const Vec& b) const;
    [[nodiscard]] Mat jacobian(const Vec& a) const;

    [[nodiscard]] const Box& domain() const { return domain_; }
    [[nodiscard]] const std::optional<Box>& codomain() const { return codomain_; }
    [[nodiscard]] double fd_step() const { return fd_step_; }
    [[nodiscard]] bool has_closed_jacobian() const { return jacobian_.has_value(); }

    /// max |phi(phi^-1(b)) - b| over the given points.
    [[nodiscard]] double round_trip_error(const std::vector<Vec>& points) const;

private:
    VectorMap forward_;
    VectorMap inverse_;
    Box domain_;
    std::optional<Box> codomain_;
    double fd_step_;
    std::optional<JacobianMap> jacobian_;
};

/// Central-difference Jacobian of f at a.
Mat central_jacobian(const VectorMap& f, const Vec& a, double h);

/// (f(x) - f(a)) / lambda.
double act_on_function(const Prevector& v, const ScalarFunction& f, const Scale& s);

/// (h(a), h(x)), no linearization.
Prevector differential(const SmoothMap& h, const Prevector& v);

/// Y(phi(a)) = J_a X(a), defined on the transition's codomain. Throws
/// SingularJacobian when |det J| < 1e-12 at a sampled or evaluated point.
ClassicalField pushforward_field(const Transition& T, const ClassicalField& X);

/// b -> phi(F(phi^-1(b))) on `target`.
PrevectorField conjugate_prevector_field(const Transition& T, const PrevectorField& F, const Box& target);

using TransitionFamily = std::function<Transition(const Scale&)>;

struct InvarianceReport {
    /// conjugated field vs realization of the pushforward, against p = 1.
    OrderVerdict equivalence;
    /// D1 sweep of the realized field in the original chart.
    OrderVerdict d1_original;
    /// D1 sweep of the conjugated field on `region`.
    OrderVerdict d1_conjugated;

    [[nodiscard]] bool invariant() const {
        return equivalence.relation == Relation::prec_prec && d1_original.bounded() && d1_conjugated.bounded();
    }
};

/// Realizes X on the transition's domain, conjugates it into the target chart
/// and compares with the realization of the pushforward field on `region`
/// (a box inside the transition's codomain).
InvarianceReport check_invariance(const ClassicalField& X, const TransitionFamily& T, const Box& region,
                                  const SweepPlan& plan, const SweepOptions& opt = {});

}  // namespace prevec
