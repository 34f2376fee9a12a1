#include "prevec/charts.hpp"

#include "prevec/errors.hpp"

#include <cmath>

namespace prevec {

namespace {

constexpr double kSingular = 1e-12;

void require_inside(const std::optional<Box>& box, const Vec& a, const char* what) {
    if (box && !box->contains(a)) {
        throw DomainExit(std::string(what) + " " + format_point(a) + " outside " + box->to_string());
    }
}

}  // namespace

double ScalarFunction::operator()(const Vec& a) const {
    require_inside(domain, a, "function evaluated at");
    return f(a);
}

Vec SmoothMap::operator()(const Vec& a) const {
    require_inside(domain, a, "map evaluated at");
    return f(a);
}

Mat central_jacobian(const VectorMap& f, const Vec& a, double h) {
    const Vec f0 = f(a);
    Mat J(f0.size(), a.size());
    for (Eigen::Index j = 0; j < a.size(); ++j) {
        Vec plus = a;
        Vec minus = a;
        plus[j] += h;
        minus[j] -= h;
        J.col(j) = (f(plus) - f(minus)) / (2 * h);
    }
    return J;
}

// =============================================================================
// Transition
// =============================================================================

Transition::Transition(VectorMap forward, VectorMap inverse, Box domain, std::optional<Box> codomain,
                       const Scale& scale, std::optional<JacobianMap> jacobian)
    : forward_(std::move(forward)),
      inverse_(std::move(inverse)),
      domain_(std::move(domain)),
      codomain_(std::move(codomain)),
      fd_step_(scale.lambda() * scale.lambda()),
      jacobian_(std::move(jacobian)) {}

Transition Transition::identity(const Box& domain, const Scale& scale) {
    auto id = [](const Vec& a) { return a; };
    return {id, id, domain, domain, scale,
            [](const Vec& a) -> Mat { return Mat::Identity(a.size(), a.size()); }};
}

Vec Transition::forward(const Vec& a) const {
    if (!domain_.contains(a)) {
        throw DomainExit("transition applied at " + format_point(a) + " outside " + domain_.to_string());
    }
    return forward_(a);
}

Vec Transition::inverse(const Vec& b) const {
    require_inside(codomain_, b, "inverse transition applied at");
    return inverse_(b);
}

Mat Transition::jacobian(const Vec& a) const {
    if (jacobian_) {
        return (*jacobian_)(a);
    }
    return central_jacobian(forward_, a, fd_step_);
}

double Transition::round_trip_error(const std::vector<Vec>& points) const {
    double worst = 0.0;
    for (const auto& b : points) {
        worst = std::max(worst, (forward(inverse(b)) - b).norm());
    }
    return worst;
}

// =============================================================================
// Prevectors
// =============================================================================

double act_on_function(const Prevector& v, const ScalarFunction& f, const Scale& s) {
    return (f(v.tip) - f(v.base)) / s.lambda();
}

Prevector differential(const SmoothMap& h, const Prevector& v) { return {h(v.base), h(v.tip)}; }

ClassicalField pushforward_field(const Transition& T, const ClassicalField& X) {
    if (!T.codomain()) {
        throw ConfigError("pushforward needs a transition with a codomain box");
    }
    for (const auto& a : T.domain().samples(16, 0)) {
        const double det = T.jacobian(a).determinant();
        if (std::abs(det) < kSingular) {
            throw SingularJacobian("|det J| = " + format_double(std::abs(det)) + " at " + format_point(a));
        }
    }
    auto map = [T, X](const Vec& b) -> Vec {
        const Vec a = T.inverse(b);
        const Mat J = T.jacobian(a);
        const double det = J.determinant();
        if (std::abs(det) < kSingular) {
            throw SingularJacobian("|det J| = " + format_double(std::abs(det)) + " at " + format_point(a));
        }
        return J * X.at(a);
    };
    return {map, *T.codomain(), X.smoothness, X.name.empty() ? "" : "pushforward of " + X.name};
}

PrevectorField conjugate_prevector_field(const Transition& T, const PrevectorField& F, const Box& target) {
    auto map = [T, F](const Vec& b) { return T.forward(F(T.inverse(b))); };
    Box range = T.codomain().value_or(target);
    if (!range.contains(target)) {
        range = target;
    }
    return {map, target, range, F.scale(), F.name().empty() ? "" : "conjugate of " + F.name()};
}

InvarianceReport check_invariance(const ClassicalField& X, const TransitionFamily& T, const Box& region,
                                  const SweepPlan& plan, const SweepOptions& opt) {
    FieldFamily original = [&](const Scale& s) { return realize_classical(X, s, T(s).domain()); };
    FieldFamily conjugated = [&](const Scale& s) {
        return conjugate_prevector_field(T(s), original(s), region);
    };
    FieldFamily pushed = [&](const Scale& s) {
        const auto t = T(s);
        return realize_classical(pushforward_field(t, X), s, region);
    };
    InvarianceReport out;
    out.equivalence = check_equivalence(conjugated, pushed, region, plan, opt);
    out.d1_original = check_d1(original, T(plan.base_scale).domain(), plan, opt);
    out.d1_conjugated = check_d1(conjugated, region, plan, opt);
    return out;
}

}  // namespace prevec
