#include "prevec/catalog.hpp"
#include "prevec/errors.hpp"
#include "prevec/flow.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace prevec;
using Big = boost::multiprecision::cpp_bin_float_100;

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

ClassicalField field(const std::string& src, int dim = 2) {
    return classical_from_source(src, dim, Box::centered(dim, 16.0), src);
}

FieldFamily family(const std::string& src, const Box& domain, int dim = 2) {
    return realize_family(field(src, dim), domain);
}

PrevectorField shift1(const Scale& s) {
    const double l = s.lambda();
    return {[l](const Vec& a) { return Vec(a.array() + l); }, Box::centered(1, 4.0), Box::centered(1, 5.0), s};
}

}  // namespace

TEST(Flow, IdentityIsConstant) {
    const auto I = identity_field(Box::centered(2, 1.0), Scale(64));
    EXPECT_EQ(flow(I, vec({0.3, 0.4}), Rational(7, 3)), vec({0.3, 0.4}));
    EXPECT_EQ(flow(I, vec({0.3, 0.4}), Rational(-7, 3)), vec({0.3, 0.4}));
}

TEST(Flow, UnitShiftReachesOneExactly) {
    EXPECT_EQ(flow(shift1(Scale(64)), vec({0.0}), Rational(1))[0], 1.0);
}

TEST(Flow, ExponentialAgainstMultiprecision) {
    for (int n : {64, 256, 1024}) {
        const Scale s(n);
        const auto F = family("( x )", Box::centered(1, 4.0), 1)(s);
        const double got = flow(F, vec({1.0}), Rational(1))[0];
        const Big exact = boost::multiprecision::pow(Big(1) + Big(1) / n, n);
        // Each of the n steps rounds once or twice.
        EXPECT_NEAR(got, exact.convert_to<double>(), 2.0 * n * kEps * 3.0) << n;
    }
    EXPECT_NEAR(flow(family("( x )", Box::centered(1, 4.0), 1)(Scale(64)), vec({1.0}), Rational(1))[0], 2.697, 1e-3);
}

TEST(Flow, ShadowOfExponentialIsE) {
    SweepPlan plan;
    plan.base_scale = Scale(64);
    plan.num_points = 5;
    const Vec e = standard_flow(family("( x )", Box::centered(1, 4.0), 1), vec({1.0}), Rational(1), plan);
    EXPECT_NEAR(e[0], std::exp(1.0), 1e-3);
}

TEST(Flow, DomainExitCarriesIteration) {
    const auto F = shift1(Scale(64));
    try {
        flow(F, vec({3.5}), Rational(1));
        FAIL();
    } catch (const DomainExit& e) {
        ASSERT_TRUE(e.iteration().has_value());
        EXPECT_EQ(*e.iteration(), 33);  // 3.5 + 33/64 > 4
    }
}

TEST(Flow, NegativeTimeInverts) {
    const auto F = realize_classical(field("( -y, x )"), Scale(128), Box::centered(2, 2.0));
    const Vec a = vec({0.5, 0.25});
    const Vec b = flow(F, a, Rational(1, 2));
    EXPECT_LE((flow(F, b, Rational(-1, 2)) - a).norm(), 64 * 1e-12);
}

TEST(FlowProperty, SemigroupOnGrid) {
    const Scale s(64);
    const auto F = realize_classical(field("( sin(y), x*y - 1 )"), s, Box::centered(2, 4.0));
    const Vec a = vec({0.25, -0.5});
    for (int i = 0; i <= 8; ++i) {
        for (int j = 0; j <= 8; ++j) {
            const Rational t1(i, 8);
            const Rational t2(j, 8);
            EXPECT_EQ(flow(F, a, t1 + t2), flow(F, flow(F, a, t1), t2));
        }
    }
    EXPECT_EQ(flow(F, a, Rational(0)), a);
}

TEST(FlowProperty, IterationCountIsFloor) {
    const Scale s(64);
    const std::vector<Rational> times{Rational(0), Rational(1, 3), Rational(355, 452), Rational(5, 2)};
    const auto traj = trajectory(shift1(s), vec({-3.0}), times);
    ASSERT_EQ(traj.iterations.size(), times.size());
    for (std::size_t j = 0; j < times.size(); ++j) {
        EXPECT_EQ(traj.iterations[j], s.steps(times[j]));
        EXPECT_EQ(traj.states[j][0], -3.0 + traj.iterations[j] / 64.0);
    }
    EXPECT_FALSE(traj.exit.has_value());
}

TEST(Trajectory, RecordsExit) {
    const auto traj = trajectory(shift1(Scale(64)), vec({3.0}), time_grid(Rational(2), 4));
    ASSERT_TRUE(traj.exit.has_value());
    EXPECT_EQ(traj.exit->iteration, 65);
    EXPECT_EQ(traj.states.size(), 3U);  // t = 0, 1/2, 1
}

TEST(FlowPrevector, InvariantUnderOwnFlow) {
    const auto F = realize_classical(field("( sin(y), x^2 )"), Scale(64), Box::centered(2, 4.0));
    const Vec a = vec({0.1, 0.7});
    const auto v = flow_prevector(F, {a, F(a)}, Rational(3, 4));
    EXPECT_EQ(v.tip, F(v.base));
}

TEST(FlowPrevector, IdentityAndTranslation) {
    const Scale s(64);
    const double l = s.lambda();
    const Prevector v{vec({0.0, 0.0}), vec({l, 0.0})};
    const auto I = identity_field(Box::centered(2, 1.0), s);
    EXPECT_EQ(flow_prevector(I, v, Rational(1)).tip, v.tip);
    const auto T = realize_classical(field("( 1, 0 )"), s, Box::centered(2, 2.0));
    const auto w = flow_prevector(T, v, Rational(1, 2));
    EXPECT_EQ(w.base, vec({0.5, 0.0}));
    EXPECT_EQ(w.tip, vec({0.5 + l, 0.0}));
}

TEST(StandardFlow, IdentityAndRotation) {
    SweepPlan plan;
    const FieldFamily I = [](const Scale& s) { return identity_field(Box::centered(2, 2.0), s); };
    EXPECT_EQ(standard_flow(I, vec({0.5, 0.5}), Rational(1), plan), vec({0.5, 0.5}));
    const double t = 355.0 / 452.0;
    const Vec r = standard_flow(family("( -y, x )", Box::centered(2, 2.0)), vec({1.0, 0.0}), Rational(355, 452), plan);
    EXPECT_NEAR(r[0], std::cos(t), 1e-3);
    EXPECT_NEAR(r[1], std::sin(t), 1e-3);
}

TEST(StandardFlow, EquivalentFieldsShareIt) {
    SweepPlan plan;
    const Box U = Box::centered(2, 2.0);
    const FieldFamily E = family(catalog_source("harmonic", 2), U);
    const FieldFamily H = displacement_family(catalog_source("rotation_step", 2), 2, U);
    const Vec a = vec({0.5, 0.0});
    const auto samples = sweep(plan, [&](const Scale& s) {
        return (flow(E(s), a, Rational(1)) - flow(H(s), a, Rational(1))).norm();
    });
    EXPECT_EQ(assess_approx(samples, plan).relation, Relation::approx);
    EXPECT_LE((standard_flow(E, a, Rational(1), plan) - standard_flow(H, a, Rational(1), plan)).norm(), 1e-3);
}

TEST(Canonical, IdentityAndTranslation) {
    const Scale s(64);
    const auto I = identity_field(Box::centered(2, 1.0), s);
    const Vec a = vec({0.25, 0.5});
    EXPECT_EQ(canonical_representative(I)(a), a);
    // Dyadic step lambda/256 keeps translation exact.
    const auto T = realize_classical(field("( 1, -2 )"), s, Box::centered(2, 2.0));
    EXPECT_EQ(canonical_representative(T)(a), T(a));
}

TEST(Canonical, EquivalentToFieldForC1Catalog) {
    SweepPlan plan;
    for (const auto& name : {"rotation", "scaling", "pendulum"}) {
        const auto v = check_canonical(family(catalog_source(name, 2), Box::centered(2, 2.0)), Box::centered(2, 1.0),
                                       plan);
        EXPECT_EQ(v.relation, Relation::prec_prec) << name;
        EXPECT_GE(v.fit.slope, 1.5) << name;
    }
}

TEST(CanonicalProperty, IdempotentAtVerdictLevel) {
    SweepPlan plan;
    const FieldFamily F = family("( sin(y), x*y )", Box::centered(2, 2.0));
    const FieldFamily Ft = [F](const Scale& s) { return canonical_representative(F(s)); };
    EXPECT_EQ(check_canonical(Ft, Box::centered(2, 1.0), plan, 8).relation, Relation::prec_prec);
}

TEST(Bounds, IdentityIsTight) {
    const auto I = identity_field(Box::centered(2, 2.0), Scale(64));
    const auto rep = verify_contraction_bounds(I, vec({0.0, 0.0}), vec({0.5, 0.0}), Rational(1), 8);
    EXPECT_EQ(rep.K_used, 0.0);
    EXPECT_TRUE(rep.all_satisfied());
    for (std::size_t j = 0; j < rep.times.size(); ++j) {
        EXPECT_EQ(rep.lhs[j], 0.5);
        EXPECT_EQ(rep.rhs[j], 0.5);
    }
}

TEST(Bounds, ExponentialAndRotation) {
    for (int n : {64, 256, 1024}) {
        const Scale s(n);
        const auto X = realize_classical(field("( x )", 1), s, Box::centered(1, 4.0));
        const auto rep = verify_contraction_bounds(X, vec({1.0}), vec({1.0 + s.lambda()}), Rational(1), 16);
        EXPECT_TRUE(rep.all_satisfied()) << n;
        EXPECT_NEAR(rep.K_used, 1.0, 0.1);
        const auto R = realize_classical(field("( -y, x )"), s, Box::centered(2, 2.0));
        EXPECT_EQ(verify_contraction_bounds(R, vec({0.5, 0.25}), vec({-0.25, 0.5}), Rational(1), 16).violations(), 0);
    }
}

TEST(BoundsProperty, UpperLineForCatalogD1Fields) {
    for (const auto& name : {"translation", "rotation", "scaling", "harmonic", "pendulum"}) {
        for (const auto& s : SweepPlan{}.scales()) {
            const auto F = family(catalog_source(name, 2), Box::centered(2, 8.0))(s);
            const auto rep = verify_contraction_bounds(F, vec({0.5, 0.25}), vec({0.125, -0.5}), Rational(1), 16);
            EXPECT_TRUE(rep.all_satisfied()) << name << " N=" << s.n_inverse();
        }
    }
}

TEST(CompareFlows, EqualFieldsAndClassicalPerturbation) {
    const Scale s(256);
    const auto F = realize_classical(field("( x )", 1), s, Box::centered(1, 8.0));
    const auto same = compare_flows(F, F, vec({1.0}), Rational(1), 8);
    EXPECT_TRUE(same.all_satisfied());
    for (double l : same.lhs) {
        EXPECT_EQ(l, 0.0);
    }
    const auto G = realize_classical(field("( x + 0.01 )", 1), s, Box::centered(1, 8.0));
    const auto rep = compare_flows(F, G, vec({1.0}), Rational(1), 16);
    EXPECT_TRUE(rep.all_satisfied());
    for (std::size_t j = 0; j < rep.times.size(); ++j) {
        const double t = rep.times[j].to_double();
        EXPECT_LE(rep.lhs[j], 0.01 * t * std::exp(t) * (1 + 1e-9));
    }
}

TEST(CompareFlows, EulerVersusHeunShadowsAgree) {
    SweepPlan plan;
    const Box U = Box::centered(2, 4.0);
    const auto X = field("( sin(y), -x )");
    const FieldFamily E = realize_family(X, U);
    const FieldFamily H = [X, U](const Scale& s) {
        const double l = s.lambda();
        return PrevectorField([X, l](const Vec& a) { return Vec(a + l * X(a + l * X(a) / 2)); }, U, U.expanded(1.0), s);
    };
    for (const auto& s : plan.scales()) {
        EXPECT_TRUE(compare_flows(E(s), H(s), vec({0.5, 0.5}), Rational(1), 8).all_satisfied());
    }
    const auto samples = sweep(plan, [&](const Scale& s) {
        return (flow(E(s), vec({0.5, 0.5}), Rational(1)) - flow(H(s), vec({0.5, 0.5}), Rational(1))).norm();
    });
    EXPECT_EQ(assess_approx(samples, plan).relation, Relation::approx);
}

TEST(Linearization, TranslationIsExact) {
    const auto T = realize_classical(field("( 0.5, 0.25 )"), Scale(64), Box::centered(2, 4.0));
    const auto c = check_linearization(T, vec({0.5, 0.5}), 64);
    EXPECT_EQ(c.deviation, 0.0);
    EXPECT_TRUE(c.satisfied);
}

TEST(Linearization, ExponentialMatchesBinomial) {
    for (int n : {64, 256}) {
        const Scale s(n);
        const auto F = realize_classical(field("( x )", 1), s, Box::centered(1, 8.0));
        for (std::int64_t k : {std::int64_t{1}, std::int64_t{n / 4}, std::int64_t{n}}) {
            const auto c = check_linearization(F, vec({1.0}), k);
            const Big exact = boost::multiprecision::pow(Big(1) + Big(1) / n, k) - 1 - Big(k) / n;
            EXPECT_NEAR(c.deviation, exact.convert_to<double>(), 1e-12) << n << " " << k;
            EXPECT_TRUE(c.satisfied);
        }
    }
}

TEST(Linearization, RotationAtOneOverLambda) {
    const Scale s(256);
    const auto R = realize_classical(field("( -y, x )"), s, Box::centered(2, 2.0));
    const auto c = check_linearization(R, vec({1.0, 0.0}), 256);
    EXPECT_TRUE(c.satisfied);
    EXPECT_GT(c.deviation, 0.1);
}

TEST(Rescaled, EqualFieldsAndNegativeControl) {
    SweepPlan plan;
    const Scale s(1024);
    const Box U = Box::centered(2, 2.0);
    const auto F = realize_classical(field("( y, -sin(x) )"), s, U);
    const Vec p = vec({0.0, 0.0});
    const Vec u = vec({1.0, 0.0});
    EXPECT_EQ(rescaled_compare(F, F, p, u, Rational(1, 8), Rational(1), plan).relation, Relation::prec_prec);
    // Harmonic linearization at the origin: the difference is cubic in the amplitude.
    const auto H = realize_classical(field("( y, -x )"), s, U);
    EXPECT_EQ(rescaled_compare(F, H, p, u, Rational(1, 8), Rational(1), plan).relation, Relation::prec_prec);
    // G = F + lambda c (x - p): relative difference stays of order one, never small.
    const double l = s.lambda();
    const PrevectorField G([F, l](const Vec& a) { return Vec(F(a) + l * 0.5 * a); }, U, U.expanded(1.0), s);
    const auto neg = rescaled_compare(F, G, p, u, Rational(1, 8), Rational(1), plan);
    EXPECT_EQ(neg.relation, Relation::prec);
    EXPECT_NEAR(neg.fit.slope, 0.0, 0.05);
    EXPECT_GT(neg.fit.points.back().magnitude, 0.5);
}

TEST(Rescaled, RequiresCommonFixedPoint) {
    SweepPlan plan;
    const Scale s(64);
    const auto F = realize_classical(field("( 1, 0 )"), s, Box::centered(2, 2.0));
    EXPECT_THROW(rescaled_compare(F, F, vec({0.0, 0.0}), vec({1.0, 0.0}), Rational(1, 8), Rational(1), plan),
                 ConfigError);
}

TEST(TimeGrid, Values) {
    const auto g = time_grid(Rational(1), 4);
    ASSERT_EQ(g.size(), 5U);
    EXPECT_EQ(g[1], Rational(1, 4));
    EXPECT_EQ(g[4], Rational(1));
}
