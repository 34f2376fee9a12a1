#include "prevec/catalog.hpp"
#include "prevec/charts.hpp"
#include "prevec/errors.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace prevec;

namespace {

const Scale kScale(256);

ClassicalField rotation() {
    return {[](const Vec& a) { return vec({-a[1], a[0]}); }, Box::centered(2, 4.0), Smoothness::ck, "rotation"};
}

Transition shear(const Scale& s) {
    return {[](const Vec& a) { return vec({a[0] + a[1], a[1]}); },
            [](const Vec& b) { return vec({b[0] - b[1], b[1]}); },
            Box::centered(2, 1.0),
            Box(vec({-2.0, -1.0}), vec({2.0, 1.0})),
            s};
}

Transition stretch(const Scale& s) {
    return {[](const Vec& a) { return vec({2 * a[0], a[1]}); },
            [](const Vec& b) { return vec({b[0] / 2, b[1]}); },
            Box::centered(2, 1.0),
            Box(vec({-2.0, -1.0}), vec({2.0, 1.0})),
            s,
            [](const Vec&) -> Mat { return Vec(vec({2.0, 1.0})).asDiagonal(); }};
}

}  // namespace

TEST(ActOnFunction, CoordinateFunction) {
    const double l = kScale.lambda();
    const ScalarFunction f{[](const Vec& a) { return a[0]; }, std::nullopt};
    EXPECT_EQ(act_on_function({vec({0.0, 0.0}), vec({l, 0.0})}, f, kScale), 1.0);
    EXPECT_EQ(act_on_function({vec({0.3, 0.2}), vec({0.3, 0.2})}, f, kScale), 0.0);
}

TEST(ActOnFunction, ProductFunction) {
    const double l = kScale.lambda();
    const ScalarFunction f{[](const Vec& a) { return a[0] * a[1]; }, std::nullopt};
    EXPECT_EQ(act_on_function({vec({1.0, 0.0}), vec({1.0 + l, l})}, f, kScale), 1.0 + l);
}

TEST(ActOnFunction, DomainExit) {
    const ScalarFunction f{[](const Vec& a) { return a[0]; }, Box::centered(2, 1.0)};
    EXPECT_THROW(act_on_function({vec({0.0, 0.0}), vec({1.5, 0.0})}, f, kScale), DomainExit);
}

TEST(ActOnFunctionProperty, LinearInFunction) {
    std::mt19937_64 rng(3);
    const Box box = Box::centered(2, 1.0);
    const ScalarFunction f{[](const Vec& a) { return std::sin(a[0]) * a[1]; }, std::nullopt};
    const ScalarFunction g{[](const Vec& a) { return a[0] * a[0] - a[1]; }, std::nullopt};
    const double alpha = 0.5;
    const double beta = -2.0;
    const ScalarFunction h{[&](const Vec& a) { return alpha * f.f(a) + beta * g.f(a); }, std::nullopt};
    for (int i = 0; i < 50; ++i) {
        const Vec a = box.sample(rng);
        const Vec x = a + kScale.lambda() * sample_unit_ball(2, rng);
        const Prevector v{a, x};
        // alpha, beta are powers of two, so scaling is exact and only the
        // final sum and quotient round.
        const double lhs = act_on_function(v, h, kScale);
        const double rhs = alpha * act_on_function(v, f, kScale) + beta * act_on_function(v, g, kScale);
        EXPECT_NEAR(lhs, rhs, 1e-12 * (1 + std::abs(lhs)));
    }
}

TEST(ActOnFunctionProperty, LeibnizUpToInfinitesimals) {
    const ScalarFunction f{[](const Vec& a) { return std::exp(a[0]) + a[1]; }, std::nullopt};
    const ScalarFunction g{[](const Vec& a) { return a[0] * a[1] * a[1]; }, std::nullopt};
    const ScalarFunction fg{[&](const Vec& a) { return f.f(a) * g.f(a); }, std::nullopt};
    SweepPlan plan;
    const Vec a = vec({0.4, -0.7});
    const Vec dir = vec({0.6, 0.8});
    const auto samples = sweep(plan, [&](const Scale& s) {
        const Prevector v{a, a + s.lambda() * dir};
        return std::abs(act_on_function(v, fg, s) - f.f(a) * act_on_function(v, g, s) -
                        act_on_function(v, f, s) * g.f(a));
    });
    EXPECT_EQ(assess_approx(samples, plan).relation, Relation::approx);
}

TEST(Differential, IdentityAndLinearMap) {
    const double l = kScale.lambda();
    const Prevector v{vec({0.0, 0.0}), vec({l, 0.0})};
    const SmoothMap id{[](const Vec& a) { return a; }, std::nullopt};
    const auto same = differential(id, v);
    EXPECT_EQ(same.base, v.base);
    EXPECT_EQ(same.tip, v.tip);
    const SmoothMap h{[](const Vec& a) { return vec({a[0] + a[1], a[0] - a[1]}); }, std::nullopt};
    const auto w = differential(h, v);
    EXPECT_EQ(w.base, vec({0.0, 0.0}));
    EXPECT_EQ(w.tip, vec({l, l}));
}

TEST(DifferentialProperty, ChainRuleIsExact) {
    std::mt19937_64 rng(11);
    const SmoothMap h{[](const Vec& a) { return vec({std::sin(a[0]) + a[1], a[0] * a[1]}); }, std::nullopt};
    const SmoothMap g{[](const Vec& a) { return vec({std::exp(a[1]), a[0] - 3 * a[1]}); }, std::nullopt};
    const SmoothMap gh{[&](const Vec& a) { return g.f(h.f(a)); }, std::nullopt};
    const Box box = Box::centered(2, 1.0);
    for (int i = 0; i < 100; ++i) {
        const Vec a = box.sample(rng);
        const Prevector v{a, a + kScale.lambda() * sample_unit_ball(2, rng)};
        const auto lhs = differential(gh, v);
        const auto rhs = differential(g, differential(h, v));
        EXPECT_EQ(lhs.base, rhs.base);
        EXPECT_EQ(lhs.tip, rhs.tip);
    }
}

TEST(Transition, RoundTripAndJacobian) {
    const auto T = shear(kScale);
    EXPECT_EQ(T.fd_step(), kScale.lambda() * kScale.lambda());
    std::vector<Vec> pts;
    for (const auto& a : T.domain().samples(32, 1)) {
        pts.push_back(T.forward(a));
    }
    EXPECT_LE(T.round_trip_error(pts), 1e-10);
    const Mat J = T.jacobian(vec({0.3, -0.2}));
    EXPECT_NEAR(J(0, 0), 1.0, 1e-9);
    EXPECT_NEAR(J(0, 1), 1.0, 1e-9);
    EXPECT_NEAR(J(1, 0), 0.0, 1e-9);
    EXPECT_NEAR(J(1, 1), 1.0, 1e-9);
    EXPECT_THROW((void)T.forward(vec({1.5, 0.0})), DomainExit);
    EXPECT_THROW((void)T.inverse(vec({0.0, 1.5})), DomainExit);
}

TEST(Pushforward, IdentityTransition) {
    const auto X = rotation();
    const auto Y = pushforward_field(Transition::identity(Box::centered(2, 1.0), kScale), X);
    for (const auto& a : Box::centered(2, 0.9).samples(10, 2)) {
        EXPECT_EQ(Y(a), X(a));
    }
}

TEST(Pushforward, DiagonalStretch) {
    const ClassicalField X{[](const Vec&) { return vec({1.0, 0.0}); }, Box::centered(2, 2.0), Smoothness::ck, "e1"};
    const auto Y = pushforward_field(stretch(kScale), X);
    EXPECT_EQ(Y(vec({0.5, 0.25})), vec({2.0, 0.0}));
}

TEST(Pushforward, RotationUnderShear) {
    const auto X = rotation();
    const auto T = shear(kScale);
    const auto Y = pushforward_field(T, X);
    for (const auto& a : Box::centered(2, 0.5).samples(12, 4)) {
        const Vec want = vec({a[0] - a[1], a[0]});  // J (-y, x) = (x - y, x)
        EXPECT_LE((Y(T.forward(a)) - want).norm(), 1e-8);
    }
}

TEST(Pushforward, SingularJacobian) {
    const Transition T([](const Vec& a) { return vec({a[0] * a[0] * a[0], a[1]}); },
                       [](const Vec& b) { return vec({std::cbrt(b[0]), b[1]}); }, Box::centered(2, 1.0),
                       Box::centered(2, 1.0), kScale, [](const Vec& a) {
                           Mat J = Mat::Identity(2, 2);
                           J(0, 0) = 3.0 * a[0] * a[0];
                           return J;
                       });
    EXPECT_THROW(pushforward_field(T, rotation()), SingularJacobian);
}

TEST(Conjugate, IdentityAndStretch) {
    const Box U = Box::centered(2, 1.0);
    const double l = kScale.lambda();
    const PrevectorField F([l](const Vec& a) { return Vec(a + vec({l, 0.0})); }, U, Box::centered(2, 1.5), kScale);
    const auto G = conjugate_prevector_field(Transition::identity(U, kScale), F, Box::centered(2, 0.5));
    const Vec b = vec({0.25, -0.125});
    EXPECT_EQ(G(b), F(b));
    const auto H = conjugate_prevector_field(stretch(kScale), F, Box::centered(2, 0.5));
    EXPECT_EQ(H(b), b + vec({2 * l, 0.0}));
}

TEST(Invariance, ShearedRotationIsEquivalentToPushforward) {
    SweepPlan plan;
    TransitionFamily T = [](const Scale& s) { return shear(s); };
    const auto rep = check_invariance(rotation(), T, Box::centered(2, 0.4), plan);
    EXPECT_EQ(rep.equivalence.relation, Relation::prec_prec);
    EXPECT_TRUE(rep.d1_original.bounded());
    EXPECT_TRUE(rep.d1_conjugated.bounded());
    EXPECT_TRUE(rep.invariant());
}

// Finite K_hat survives conjugation at every sweep scale.
TEST(InvarianceProperty, D1EstimateFiniteInBothCharts) {
    for (const auto& s : SweepPlan{}.scales()) {
        const auto F = realize_classical(rotation(), s, Box::centered(2, 1.0));
        const auto G = conjugate_prevector_field(shear(s), F, Box::centered(2, 0.4));
        const auto eF = estimate_constants(F, Box::centered(2, 0.9), 32, 1, false);
        const auto eG = estimate_constants(G, Box::centered(2, 0.35), 32, 1, false);
        EXPECT_LT(eF.K_hat, 1.1);
        EXPECT_LT(eG.K_hat, 4.0);  // |J| |J^-1| K for the shear
    }
}
