#include "prevec/catalog.hpp"
#include "prevec/dsl.hpp"
#include "prevec/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

using namespace prevec;
using dsl::FieldKind;

namespace {

std::vector<std::string> read_lines(const std::string& name) {
    std::ifstream in(std::string(PREVEC_SOURCE_DIR) + "/tests/golden/" + name);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) {
            out.push_back(line);
        }
    }
    return out;
}

Vec eval(const std::string& src, const Vec& p, double lambda, FieldKind kind = FieldKind::displacement_map) {
    return dsl::evaluate(dsl::parse(src, static_cast<int>(p.size()), kind), p, lambda);
}

}  // namespace

TEST(DslParse, RotationField) {
    const auto def = dsl::parse("( -y, x )", 2, FieldKind::classical_field);
    EXPECT_EQ(def.components.size(), 2U);
    const Vec v = dsl::evaluate(def, vec({1.0, 0.0}), 0.0);
    EXPECT_EQ(v[0], 0.0);
    EXPECT_EQ(v[1], 1.0);
}

TEST(DslParse, ShiftDisplacement) {
    const Vec v = eval("( x + lambda, y )", vec({0.0, 0.0}), 1.0 / 64);
    EXPECT_EQ(v[0], 1.0 / 64);
    EXPECT_EQ(v[1], 0.0);
}

TEST(DslParse, OscillatorE3) {
    const double l = 1.0 / 64;
    const Vec v = eval("( x, y + lambda^2 * sin(pi*x/(2*lambda)) )", vec({l, 0.0}), l);
    EXPECT_EQ(v[0], l);
    EXPECT_EQ(v[1], l * l);
}

TEST(DslParse, Precedence) {
    const Vec p = vec({2.0, 3.0});
    EXPECT_EQ(eval("( 2^3^2 )", vec({0.0}), 0.0, FieldKind::scalar_probe)[0], 512.0);
    EXPECT_EQ(eval("( -2^2 )", vec({0.0}), 0.0, FieldKind::scalar_probe)[0], -4.0);
    EXPECT_EQ(eval("( 1 - 2 - 3, x*y+x/y )", p, 0.0)[0], -4.0);
    EXPECT_EQ(eval("( 1 - 2 - 3, x*y+x/y )", p, 0.0)[1], 6.0 + 2.0 / 3.0);
    EXPECT_EQ(eval("( 2^-1 )", vec({0.0}), 0.0, FieldKind::scalar_probe)[0], 0.5);
}

TEST(DslParse, ScalarProbeWithoutTuple) {
    const auto def = dsl::parse("x*y + 1", 2, FieldKind::scalar_probe);
    EXPECT_EQ(dsl::evaluate(def, vec({2.0, 5.0}), 0.0)[0], 11.0);
    // A parenthesised expression followed by more input is an expression.
    const auto def2 = dsl::parse("(x + 1)*y", 2, FieldKind::scalar_probe);
    EXPECT_EQ(dsl::evaluate(def2, vec({2.0, 5.0}), 0.0)[0], 15.0);
}

TEST(DslParse, HigherDimensionVariables) {
    const auto def = dsl::parse("( x2, x3, x4, -x1 )", 4, FieldKind::classical_field);
    const Vec v = dsl::evaluate(def, vec({1.0, 2.0, 3.0, 4.0}), 0.0);
    EXPECT_EQ(v, vec({2.0, 3.0, 4.0, -1.0}));
    EXPECT_THROW(dsl::parse("( x, x2, x3, x4 )", 4, FieldKind::classical_field), UnknownIdentifier);
}

TEST(DslErrors, ArityAndIdentifiers) {
    EXPECT_THROW(dsl::parse("( x, y, x )", 2, FieldKind::classical_field), ArityMismatch);
    EXPECT_THROW(dsl::parse("( x, y )", 2, FieldKind::scalar_probe), ArityMismatch);
    EXPECT_THROW(dsl::parse("( z, y )", 2, FieldKind::classical_field), UnknownIdentifier);
    try {
        dsl::parse("( x, y + q )", 2, FieldKind::classical_field);
        FAIL();
    } catch (const UnknownIdentifier& e) {
        EXPECT_EQ(e.offset(), 9U);
    }
}

TEST(DslErrors, SyntaxOffsetsAreStable) {
    const auto golden = read_lines("dsl_errors.txt");
    ASSERT_EQ(golden.size(), 9U);
    for (const auto& line : golden) {
        const auto sep = line.find(" -> ");
        const std::string src = line.substr(0, sep);
        try {
            dsl::parse(src, 2, FieldKind::scalar_probe);
            ADD_FAILURE() << "no error for " << src;
        } catch (const Error& e) {
            EXPECT_EQ(std::string(to_string(e.kind())) + ": " + e.what(), line.substr(sep + 4)) << src;
        }
    }
}

TEST(DslErrors, SyntaxErrorCarriesExpectedSet) {
    try {
        dsl::parse("( x, y", 2, FieldKind::classical_field);
        FAIL();
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.offset(), 6U);
        EXPECT_EQ(e.expected(), (std::vector<std::string>{"','", "')'"}));
    }
}

TEST(DslEvaluate, DomainErrorNamesSubexpression) {
    try {
        eval("( 1/x, 0 )", vec({0.0, 0.0}), 0.0, FieldKind::classical_field);
        FAIL();
    } catch (const DomainError& e) {
        EXPECT_EQ(e.subexpression(), "(1 / x)");
        EXPECT_EQ(std::string(e.what()), "division by zero in (1 / x)");
    }
    EXPECT_THROW(eval("( log(x - 1) )", vec({1.0}), 0.0, FieldKind::scalar_probe), DomainError);
    EXPECT_THROW(eval("( sqrt(x) )", vec({-1.0}), 0.0, FieldKind::scalar_probe), DomainError);
}

TEST(DslEvaluate, FunctionsMatchLibm) {
    const Vec p = vec({0.3, 1.7});
    const Vec v = eval("( sin(x)+cos(y)+tan(x)+exp(y)+log(y)+sqrt(y)+abs(-x)+floor(y), 0 )", p, 0.0);
    const double want = std::sin(0.3) + std::cos(1.7) + std::tan(0.3) + std::exp(1.7) + std::log(1.7) +
                        std::sqrt(1.7) + 0.3 + 1.0;
    EXPECT_EQ(v[0], want);
}

// Catalog sources: printing is pinned and the evaluated values agree with
// closed forms written out independently here.
TEST(DslGolden, CatalogPrintForms) {
    const auto golden = read_lines("dsl_catalog_print.txt");
    ASSERT_EQ(golden.size(), catalog().size());
    for (std::size_t i = 0; i < golden.size(); ++i) {
        const auto& e = catalog()[i];
        const auto def = dsl::parse(catalog_source(e.name, 2), 2, e.kind);
        EXPECT_EQ(e.name + " | " + dsl::print(def), golden[i]);
    }
}

TEST(DslGolden, CatalogValues) {
    const double l = 1.0 / 64;
    const Vec p = vec({0.375, -0.625});
    const double x = p[0];
    const double y = p[1];
    auto value = [&](const std::string& name, const Params& params = {}) {
        const auto& e = catalog_entry(name);
        return dsl::evaluate(dsl::parse(catalog_source(name, 2, params), 2, e.kind), p, l);
    };
    EXPECT_EQ(value("translation", {{"v1", 2}, {"v2", -1}}), vec({2.0, -1.0}));
    EXPECT_EQ(value("rotation"), vec({-y, x}));
    EXPECT_EQ(value("rotation", {{"w", 2}, {"cx", 1}, {"cy", 0.5}}), vec({-2 * (y - 0.5), 2 * (x - 1)}));
    EXPECT_EQ(value("scaling", {{"c", 3}}), vec({3 * x, 3 * y}));
    EXPECT_EQ(value("affine", {{"c", 2}, {"b", 1}}), vec({2 * x + 1, 2 * y + 1}));
    EXPECT_EQ(value("pendulum"), vec({y, -std::sin(x)}));
    const Vec rp = value("rescaled_pendulum", {{"a", 0.01}});
    EXPECT_EQ(rp[0], y);
    EXPECT_NEAR(rp[1], -std::sin(0.01 * x) / 0.01, 1e-15);
    EXPECT_EQ(value("harmonic"), vec({y, -x}));
    EXPECT_EQ(value("shift"), vec({x + l, y}));
    const Vec rs = value("rotation_step");
    EXPECT_NEAR(rs[0], std::cos(l) * x + std::sin(l) * y, 1e-16);
    EXPECT_NEAR(rs[1], -std::sin(l) * x + std::cos(l) * y, 1e-16);
    const double s = std::sin(M_PI * x / (2 * l));
    EXPECT_NEAR(value("osc_e2")[1], y + l * s, 1e-15);
    EXPECT_NEAR(value("osc_e3")[1], y + l * l * s, 1e-15);
    EXPECT_NEAR(value("osc_e4")[1], y + l * l * s, 1e-15);
    EXPECT_EQ(value("identity"), p);
}

// The lambda-dependent oscillators at the lattice points x = k lambda.
TEST(DslGolden, OscillatorsOnLattice) {
    for (int n : {64, 128, 1024}) {
        const double l = 1.0 / n;
        const auto e2 = dsl::parse(catalog_source("osc_e2", 2), 2, FieldKind::displacement_map);
        const auto e3 = dsl::parse(catalog_source("osc_e3", 2), 2, FieldKind::displacement_map);
        // sin(k pi / 2) = 1, 0, -1, 0 for k = 1, 2, 3, 4.
        const double want[] = {0.0, 1.0, 0.0, -1.0, 0.0};
        for (int k = 0; k <= 4; ++k) {
            const Vec p = vec({k * l, 0.5});
            EXPECT_NEAR(dsl::evaluate(e2, p, l)[1] - 0.5, want[k] * l, 1e-15);
            EXPECT_NEAR(dsl::evaluate(e3, p, l)[1] - 0.5, want[k] * l * l, 1e-17);
        }
    }
}

TEST(DslProperty, PrintParseRoundTripIsBitExact) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    std::vector<std::string> sources;
    for (const auto& e : catalog()) {
        sources.push_back(catalog_source(e.name, 2, {}));
    }
    sources.push_back("( exp(-x^2) * cos(3*y) / (1 + abs(x)), floor(2*x) - sqrt(y^2 + 1) )");
    sources.push_back("( -(-(-x)), 1e-3 * x * y - 2.5e2 )");
    for (const auto& src : sources) {
        const auto def = dsl::parse(src, 2, FieldKind::displacement_map);
        const auto again = dsl::parse(dsl::print(def), 2, FieldKind::displacement_map);
        EXPECT_EQ(dsl::print(again), dsl::print(def));
        for (int i = 0; i < 100; ++i) {
            const Vec p = vec({u(rng), u(rng)});
            const Vec a = dsl::evaluate(def, p, 1.0 / 64);
            const Vec b = dsl::evaluate(again, p, 1.0 / 64);
            EXPECT_EQ(a, b) << src;
        }
    }
}

TEST(DslProperty, EvaluationIsPure) {
    const auto def = dsl::parse(catalog_source("osc_e2", 2), 2, FieldKind::displacement_map);
    const Vec p = vec({0.123, 0.456});
    const Vec first = dsl::evaluate(def, p, Scale(128));
    for (int i = 0; i < 10; ++i) {
        EXPECT_EQ(dsl::evaluate(def, p, Scale(128)), first);
    }
}
