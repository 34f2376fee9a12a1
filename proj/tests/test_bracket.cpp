#include "prevec/bracket.hpp"
#include "prevec/catalog.hpp"
#include "prevec/errors.hpp"

#include <gtest/gtest.h>

using namespace prevec;

namespace {

const Box kDomain = Box::centered(2, 2.0);

ClassicalField field(const std::string& src) { return classical_from_source(src, 2, Box::centered(2, 16.0), src); }

FieldFamily realized(const std::string& src) { return realize_family(field(src), kDomain); }

FieldFamily catalog_family(const std::string& name) {
    const auto& e = catalog_entry(name);
    if (e.kind == dsl::FieldKind::displacement_map) {
        return displacement_family(catalog_source(name, 2), 2, kDomain);
    }
    return realized(catalog_source(name, 2));
}

const Scale k64(64);

}  // namespace

TEST(Commutator, SelfAndCommutingTranslations) {
    const auto F = realized("( sin(y), x )")(k64);
    const auto H = commutator(F, F);
    const double tol = k64.lambda() * k64.lambda() * k64.lambda();
    for (const auto& a : Box::centered(2, 0.5).samples(16, 1)) {
        EXPECT_LE((H(a) - a).norm(), 2 * tol + resolvable_tolerance(a));
    }
    const auto T = commutator(realized("( 1, 0 )")(k64), realized("( 0, 1 )")(k64));
    EXPECT_LE((T(vec({0.25, 0.5})) - vec({0.25, 0.5})).norm(), 2 * tol);
}

TEST(Commutator, E2CoreStepIsExact) {
    const auto F = catalog_family("shift")(k64);
    const auto G = catalog_family("osc_e2")(k64);
    EXPECT_EQ(commutator(F, G)(vec({0.0, 0.0})), vec({0.0, k64.lambda()}));
}

TEST(LieBracket, ShearPairE2) {
    for (int n : {64, 128, 1024}) {
        const Scale s(n);
        const Vec b = lie_bracket(catalog_family("shift")(s), catalog_family("osc_e2")(s))(vec({0.0, 0.0}));
        EXPECT_NEAR(b[0], 0.0, 1e-12);
        EXPECT_NEAR(b[1], 1.0, 1e-12);
    }
}

TEST(LieBracket, OscillatorPairE3) {
    const double l = k64.lambda();
    const auto F = catalog_family("shift")(k64);
    const auto G = catalog_family("osc_e3")(k64);
    const auto B = lie_bracket(F, G);
    EXPECT_LE((B(vec({0.0, 0.0})) - vec({0.0, l})).norm(), 1e-12);
    EXPECT_LE((B(vec({l, 0.0})) - vec({l, -l})).norm(), 1e-12);
    // The scaled shortcut agrees exactly at the origin.
    EXPECT_LE((bracket_via_scaling(F, G)(vec({0.0, 0.0})) - vec({0.0, l})).norm(), 1e-12);
}

TEST(LieBracket, SelfBracketIsIdentityClass) {
    const FieldFamily F = realized("( -y, x )");
    SweepPlan plan;
    const std::vector<Vec> pts{vec({0.5, 0.25}), vec({-0.25, 0.5})};
    EXPECT_EQ(check_bracket_equivalence(F, F, [](const Scale& s) { return identity_field(kDomain, s); }, pts, plan)
                  .relation,
              Relation::prec_prec);
}

TEST(LieBracket, DomainExitNamesIterate) {
    const Box small = Box::centered(2, 0.3);
    const auto F = realize_classical(field("( -y, x )"), k64, small);
    const auto G = realize_classical(field("( 1, 0 )"), k64, small);
    try {
        (void)lie_bracket(F, G)(vec({0.29, 0.29}));
        FAIL();
    } catch (const DomainExit& e) {
        EXPECT_TRUE(e.iteration().has_value());
    }
}

TEST(BracketProperty, AntisymmetryAsMaps) {
    const auto F = realized("( -y, x )")(k64);
    const auto G = realized("( 1, x^2 )")(k64);
    const double tol = k64.lambda() * k64.lambda() * k64.lambda();
    const auto FG = lie_bracket(F, G);
    const auto GF = lie_bracket(G, F);
    for (const auto& a : Box::centered(2, 0.5).samples(8, 3)) {
        EXPECT_LE((GF(FG(a)) - a).norm(), 2 * 64 * tol * 4);
    }
}

TEST(BracketProperty, PrevectorClosureForCatalogPairs) {
    SweepPlan plan;
    const std::vector<Vec> pts{vec({0.25, 0.25}), vec({-0.5, 0.125})};
    const std::vector<std::pair<std::string, std::string>> pairs{
        {"rotation", "translation"}, {"scaling", "rotation"}, {"pendulum", "translation"}};
    for (const auto& [a, b] : pairs) {
        EXPECT_TRUE(check_bracket_prevector(catalog_family(a), catalog_family(b), pts, plan).bounded()) << a << b;
    }
}

TEST(BracketProperty, D2PairBracketIsD1) {
    SweepPlan plan;
    const FieldFamily F = realized("( -y, x )");
    const FieldFamily G = realized("( 1, x^2 )");
    const FieldFamily B = [F, G](const Scale& s) {
        const auto b = lie_bracket(F(s), G(s));
        return b.with_domain(Box::centered(2, 0.6));
    };
    SweepOptions opt;
    opt.num_samples = 8;
    EXPECT_TRUE(check_d1(B, Box::centered(2, 0.5), plan, opt).bounded());
}

TEST(BracketScaling, AgreesWithIteratedForD2Pair) {
    SweepPlan plan;
    const FieldFamily F = realized("( -y, x )");
    const FieldFamily G = realized("( 1, 0 )");
    const Vec a = vec({0.5, 0.25});
    const auto samples = sweep(plan, [&](const Scale& s) {
        return (bracket_via_scaling(F(s), G(s))(a) - lie_bracket(F(s), G(s))(a)).norm();
    });
    EXPECT_EQ(assess(samples, 1.0, plan).relation, Relation::prec_prec);
    const auto T = bracket_via_scaling(realized("( 1, 0 )")(k64), realized("( 0, 1 )")(k64));
    EXPECT_LE((T(a) - a).norm(), 1e-10);
}

TEST(ClassicalBracket, Fixtures) {
    const auto X = field("( -y, x )");
    const auto Y = field("( 1, 0 )");
    const Vec a = vec({0.3, -0.7});
    EXPECT_LE(classical_bracket(X, X, a, 1e-4).norm(), 1e-10);
    EXPECT_LE((classical_bracket(X, Y, a, 1e-4) - vec({0.0, -1.0})).norm(), 1e-8);
    const auto Y2 = field("( 2, 0 )");
    EXPECT_LE((classical_bracket(X, Y2, a, 1e-4) - 2 * classical_bracket(X, Y, a, 1e-4)).norm(), 1e-8);
}

TEST(ClassicalBracket, FlowLimitAgrees) {
    const auto X = field("( -y, x )");
    const auto Y = field("( 1, x^2 )");
    for (const auto& a : {vec({0.3, -0.7}), vec({0.0, 0.0}), vec({-0.5, 0.5})}) {
        const Vec d = classical_bracket(X, Y, a, 1e-5);
        EXPECT_LE((classical_bracket_flow_limit(X, Y, a, 1e-3) - d).norm(), 1e-2);
    }
}

TEST(BracketRealizesClassical, RotationTranslation) {
    SweepPlan plan;
    const std::vector<Vec> pts{vec({0.0, 0.0}), vec({0.5, 0.25}), vec({-0.25, 0.5}), vec({0.125, -0.375}),
                               vec({-0.5, -0.5})};
    const auto rep = check_bracket_realizes_classical(realized("( -y, x )"), realized("( 1, 0 )"), field("( -y, x )"),
                                                      field("( 1, 0 )"), pts, plan);
    EXPECT_TRUE(rep.all(Relation::prec_prec));
    ASSERT_TRUE(rep.classical.has_value());
    for (const auto& c : *rep.classical) {
        EXPECT_LE((c - vec({0.0, -1.0})).norm(), 1e-6);
    }
    for (const auto& v : rep.verdicts) {
        EXPECT_GE(v.fit.slope, 0.5);
    }
}

TEST(BracketRealizesClassical, EqualFields) {
    SweepPlan plan;
    const auto rep = check_bracket_realizes_classical(realized("( sin(y), x )"), realized("( sin(y), x )"),
                                                      field("( sin(y), x )"), field("( sin(y), x )"),
                                                      {vec({0.25, 0.25})}, plan);
    EXPECT_TRUE(rep.all(Relation::prec_prec));
}

TEST(BracketNegativeControls, E2NotPrevector) {
    SweepPlan plan;
    const auto v = check_bracket_prevector(catalog_family("shift"), catalog_family("osc_e2"), {vec({0.0, 0.0})}, plan);
    EXPECT_FALSE(v.bounded());
    for (const auto& p : v.fit.points) {
        EXPECT_NEAR(p.magnitude, 1.0, 1e-12);
    }
}

TEST(BracketNegativeControls, E4NotEquivalent) {
    SweepPlan plan;
    const FieldFamily I = [](const Scale& s) { return identity_field(kDomain, s); };
    const auto G = catalog_family("osc_e4");
    EXPECT_EQ(check_equivalence(G, I, Box::centered(2, 0.5), plan).relation, Relation::prec_prec);
    const auto v = check_bracket_equivalence(catalog_family("shift"), G, I, {vec({0.0, 0.0})}, plan);
    EXPECT_NE(v.relation, Relation::prec_prec);
    EXPECT_EQ(lie_bracket(catalog_family("shift")(k64), I(k64))(vec({0.0, 0.0})), vec({0.0, 0.0}));
}

TEST(Commutation, Translations) {
    SweepPlan plan;
    const auto rep = check_commutation(realized("( 1, 0 )"), realized("( 0, 1 )"), Box::centered(2, 0.5), Rational(1),
                                       plan);
    EXPECT_EQ(rep.flows.relation, Relation::prec_prec);
    EXPECT_EQ(rep.bracket.relation, Relation::prec_prec);
    EXPECT_TRUE(rep.agree);
    EXPECT_TRUE(rep.commuting());
}

TEST(Commutation, ConcentricRotations) {
    SweepPlan plan;
    const auto rep = check_commutation(realized("( -y, x )"), realized("( -2*y, 2*x )"), Box::centered(2, 0.5),
                                       Rational(1), plan);
    EXPECT_TRUE(rep.commuting());
    EXPECT_TRUE(rep.agree);
}

TEST(Commutation, RotationTranslationFailsBoth) {
    SweepPlan plan;
    const auto rep = check_commutation(realized("( -y, x )"), realized("( 1, 0 )"), Box::centered(2, 0.5), Rational(1),
                                       plan);
    EXPECT_NE(rep.flows.relation, Relation::prec_prec);
    EXPECT_NE(rep.bracket.relation, Relation::prec_prec);
    EXPECT_TRUE(rep.agree);
    EXPECT_FALSE(rep.commuting());
}

TEST(Straighten, TranslationChart) {
    SweepPlan plan;
    const auto st = straighten({field("( 1, 0 )"), field("( 0, 1 )")}, vec({0.0, 0.0}), kDomain, plan);
    EXPECT_EQ(st.verdicts.size(), 2U);
    for (const auto& v : st.verdicts) {
        EXPECT_EQ(v.relation, Relation::prec_prec);
    }
    const Vec p = st.chart.forward(vec({0.125, -0.25}));
    EXPECT_NEAR(p[0], 0.125, 1e-12);
    EXPECT_NEAR(p[1], -0.25, 1e-12);
}

TEST(Straighten, NonCommutingAndDependent) {
    SweepPlan plan;
    EXPECT_THROW(straighten({field("( 1, 0 )"), field("( 0, 1 + x^2 )")}, vec({0.5, 0.0}), kDomain, plan),
                 NotCommuting);
    EXPECT_THROW(straighten({field("( 1, 0 )"), field("( 2, 0 )")}, vec({0.0, 0.0}), kDomain, plan), NotIndependent);
}

TEST(Straighten, RotationNearUnitPoint) {
    SweepPlan plan;
    const auto st = straighten({field("( -y, x )")}, vec({1.0, 0.0}), kDomain, plan);
    ASSERT_EQ(st.verdicts.size(), 1U);
    EXPECT_EQ(st.verdicts[0].relation, Relation::prec_prec);
    // Psi(t, s) = rotation by t of (1 + s, 0).
    const double t = 0.2;
    const double s = 0.1;
    const Vec got = st.chart.forward(vec({t, s}));
    EXPECT_NEAR(got[0], (1 + s) * std::cos(t), 5e-3);
    EXPECT_NEAR(got[1], (1 + s) * std::sin(t), 5e-3);
    EXPECT_LE((st.chart.inverse(got) - vec({t, s})).norm(), 1e-9);
}

TEST(EulerFlow, FractionalStepIsContinuous) {
    const auto X = field("( 1, 0 )");
    const Vec a = vec({0.0, 0.0});
    EXPECT_NEAR(euler_flow(X, a, 0.3, 1.0 / 64)[0], 0.3, 1e-15);
    EXPECT_NEAR(euler_flow(X, a, -0.3, 1.0 / 64)[0], -0.3, 1e-15);
}
