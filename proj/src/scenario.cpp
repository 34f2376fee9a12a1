#include "prevec/scenario.hpp"

#include "prevec/bracket.hpp"
#include "prevec/charts.hpp"
#include "prevec/flow.hpp"
#include "prevec/pendulum.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <set>
#include <sstream>
#include <thread>

namespace prevec {

namespace {

// =============================================================================
// Reading JSON with useful error messages
// =============================================================================

class Reader {
public:
    Reader(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) {
            fail("expected an object");
        }
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(where_ + ": " + msg); }

    [[nodiscard]] bool has(const std::string& key) const {
        seen_.insert(key);
        return j_.contains(key);
    }

    const Json& at(const std::string& key) const {
        seen_.insert(key);
        if (!j_.contains(key)) {
            fail("missing required key '" + key + "'");
        }
        return j_.at(key);
    }

    [[nodiscard]] std::string str(const std::string& key) const {
        const auto& v = at(key);
        if (!v.is_string()) {
            fail("'" + key + "' must be a string");
        }
        return v.get<std::string>();
    }
    [[nodiscard]] std::string str(const std::string& key, const std::string& fallback) const {
        return has(key) ? str(key) : fallback;
    }

    [[nodiscard]] std::int64_t integer(const std::string& key) const {
        const auto& v = at(key);
        if (!v.is_number_integer()) {
            fail("'" + key + "' must be an integer");
        }
        return v.get<std::int64_t>();
    }
    [[nodiscard]] std::int64_t integer(const std::string& key, std::int64_t fallback) const {
        return has(key) ? integer(key) : fallback;
    }

    [[nodiscard]] double number(const std::string& key) const {
        const auto& v = at(key);
        if (!v.is_number()) {
            fail("'" + key + "' must be a number");
        }
        return v.get<double>();
    }
    [[nodiscard]] double number(const std::string& key, double fallback) const {
        return has(key) ? number(key) : fallback;
    }

    [[nodiscard]] Rational rational(const std::string& key) const { return to_rational(at(key), key); }
    [[nodiscard]] Rational rational(const std::string& key, const Rational& fallback) const {
        return has(key) ? rational(key) : fallback;
    }

    Rational to_rational(const Json& v, const std::string& key) const {
        if (v.is_number_integer()) {
            return {v.get<std::int64_t>()};
        }
        if (v.is_number()) {
            return Rational::parse(v.dump());
        }
        if (v.is_string()) {
            try {
                return Rational::parse(v.get<std::string>());
            } catch (const ConfigError& e) {
                fail("'" + key + "': " + e.what());
            }
        }
        fail("'" + key + "' must be a number or a string like \"355/452\"");
    }

    Vec point(const Json& v, int dim, const std::string& key) const {
        if (!v.is_array() || static_cast<int>(v.size()) != dim) {
            fail("'" + key + "' must be an array of " + std::to_string(dim) + " numbers");
        }
        Vec p(dim);
        for (int i = 0; i < dim; ++i) {
            if (!v[static_cast<std::size_t>(i)].is_number()) {
                fail("'" + key + "' must contain numbers only");
            }
            p[i] = v[static_cast<std::size_t>(i)].get<double>();
        }
        return p;
    }
    [[nodiscard]] Vec point(const std::string& key, int dim) const { return point(at(key), dim, key); }

    [[nodiscard]] std::vector<Vec> points(const std::string& key, int dim) const {
        const auto& v = at(key);
        if (!v.is_array() || v.empty()) {
            fail("'" + key + "' must be a non-empty array of points");
        }
        std::vector<Vec> out;
        for (const auto& p : v) {
            out.push_back(point(p, dim, key));
        }
        return out;
    }

    Box box(const Json& v, int dim, const std::string& key) const {
        Reader r(v, where_ + "." + key);
        Box b(r.point("lo", dim), r.point("hi", dim));
        r.done();
        return b;
    }
    [[nodiscard]] Box box(const std::string& key, int dim) const { return box(at(key), dim, key); }

    [[nodiscard]] std::vector<std::string> names(const std::string& key, std::size_t count) const {
        const auto& v = at(key);
        if (!v.is_array() || v.size() != count) {
            fail("'" + key + "' must list exactly " + std::to_string(count) + " field names");
        }
        std::vector<std::string> out;
        for (const auto& s : v) {
            if (!s.is_string()) {
                fail("'" + key + "' must contain strings");
            }
            out.push_back(s.get<std::string>());
        }
        return out;
    }

    /// Rejects keys nobody asked about, which are almost always typos.
    void done() const {
        for (const auto& [k, _] : j_.items()) {
            if (seen_.count(k) == 0) {
                fail("unknown key '" + k + "'");
            }
        }
    }

    [[nodiscard]] const std::string& where() const { return where_; }

private:
    const Json& j_;
    std::string where_;
    mutable std::set<std::string> seen_;
};

bool is_power_of_two(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

SweepPlan read_plan(const Reader& root) {
    SweepPlan plan;
    const auto n = root.integer("scale", 64);
    if (!is_power_of_two(n) || n < 2) {
        root.fail("'scale' must be a power of two >= 2, got " + std::to_string(n));
    }
    plan.base_scale = Scale(n);
    if (root.has("sweep")) {
        Reader s(root.at("sweep"), root.where() + ".sweep");
        plan.num_points = static_cast<int>(s.integer("points", plan.num_points));
        plan.ratio = static_cast<int>(s.integer("ratio", plan.ratio));
        plan.slope_tolerance = s.number("slope_tolerance", plan.slope_tolerance);
        plan.strict_margin = s.number("strict_margin", plan.strict_margin);
        plan.zero_threshold = s.number("zero_threshold", plan.zero_threshold);
        s.done();
    }
    plan.validate();
    return plan;
}

FieldSpec read_field(const std::string& name, const Json& j, int dim) {
    Reader r(j, "fields." + name);
    FieldSpec f;
    f.name = name;
    if (r.has("catalog")) {
        if (r.has("source")) {
            r.fail("give either 'catalog' or 'source', not both");
        }
        f.catalog = r.str("catalog");
        Params params;
        if (r.has("params")) {
            const auto& p = r.at("params");
            if (!p.is_object()) {
                r.fail("'params' must be an object of numbers");
            }
            for (const auto& [k, v] : p.items()) {
                if (!v.is_number()) {
                    r.fail("parameter '" + k + "' must be a number");
                }
                params[k] = v.get<double>();
            }
        }
        f.kind = catalog_entry(f.catalog).kind;
        f.source = catalog_source(f.catalog, dim, params);
    } else {
        f.source = r.str("source");
        f.kind = dsl::field_kind_from_string(r.str("kind", "classical_field"));
        if (f.kind != dsl::FieldKind::classical_field && f.kind != dsl::FieldKind::displacement_map) {
            r.fail("field kind must be classical_field or displacement_map");
        }
    }
    if (r.has("domain")) {
        f.domain = r.box("domain", dim);
    }
    if (r.has("range")) {
        f.range = r.box("range", dim);
    }
    r.done();
    // Parse now so that DSL errors surface as configuration errors.
    try {
        if (f.kind == dsl::FieldKind::classical_field) {
            (void)classical_from_source(f.source, dim, std::nullopt, name);
        } else {
            (void)dsl::parse(f.source, dim, f.kind);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError("fields." + name + ": " + e.what());
    }
    return f;
}

// =============================================================================
// Expectations
// =============================================================================

struct Expectation {
    enum class Kind { none, label, relation, value, error } kind = Kind::none;
    std::string label;
    Relation relation = Relation::inconclusive;
    Vec value;
    double tolerance = 0.0;
    std::string error;

    [[nodiscard]] bool relation_matches(Relation got) const {
        if (relation == Relation::prec) {
            return got == Relation::prec || got == Relation::prec_prec;
        }
        return got == relation;
    }
};

bool is_relation_name(const std::string& s) {
    for (auto r : {Relation::prec, Relation::prec_prec, Relation::approx, Relation::fails, Relation::inconclusive}) {
        if (s == to_string(r)) {
            return true;
        }
    }
    return false;
}

bool is_error_name(const std::string& s) {
    for (int k = 0; k <= static_cast<int>(ErrorKind::IoError); ++k) {
        if (s == to_string(static_cast<ErrorKind>(k))) {
            return true;
        }
    }
    return false;
}

struct ExpectRules {
    std::vector<std::string> labels;
    bool relation = false;
    bool value = false;
};

Expectation read_expectation(const Reader& r, const ExpectRules& rules, int dim) {
    Expectation e;
    if (!r.has("expect")) {
        return e;  // report only
    }
    const auto& j = r.at("expect");
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (std::find(rules.labels.begin(), rules.labels.end(), s) != rules.labels.end()) {
            e.kind = Expectation::Kind::label;
            e.label = s;
            return e;
        }
        if (rules.relation && is_relation_name(s)) {
            e.kind = Expectation::Kind::relation;
            e.relation = relation_from_string(s);
            return e;
        }
        std::string allowed;
        for (const auto& l : rules.labels) {
            allowed += (allowed.empty() ? "" : ", ") + l;
        }
        if (rules.relation) {
            allowed += std::string(allowed.empty() ? "" : ", ") + "a relation name";
        }
        r.fail("unsupported expectation '" + s + "' (allowed: " + allowed + ")");
    }
    Reader o(j, r.where() + ".expect");
    if (o.has("error")) {
        e.kind = Expectation::Kind::error;
        e.error = o.str("error");
        if (!is_error_name(e.error)) {
            o.fail("unknown error kind '" + e.error + "'");
        }
        o.done();
        return e;
    }
    if (!rules.value) {
        o.fail("this check does not produce a vector value");
    }
    e.kind = Expectation::Kind::value;
    e.value = o.point("value", dim);
    e.tolerance = o.number("tolerance");
    if (!(e.tolerance >= 0.0)) {
        o.fail("tolerance must be non-negative");
    }
    o.done();
    return e;
}

// =============================================================================
// Context
// =============================================================================

struct Context {
    const ScenarioConfig& cfg;

    [[nodiscard]] const FieldSpec& spec(const Reader& r, const std::string& name) const {
        auto it = cfg.fields.find(name);
        if (it == cfg.fields.end()) {
            r.fail("unknown field '" + name + "'");
        }
        return it->second;
    }

    [[nodiscard]] FieldFamily family(const Reader& r, const std::string& name) const {
        const auto& f = spec(r, name);
        const Box domain = f.domain.value_or(cfg.domain);
        if (f.kind == dsl::FieldKind::classical_field) {
            return realize_family(classical_from_source(f.source, cfg.dimension, std::nullopt, name), domain,
                                  f.range);
        }
        return displacement_family(f.source, cfg.dimension, domain, f.range, name);
    }

    [[nodiscard]] ClassicalField classical(const Reader& r, const std::string& name) const {
        const auto& f = spec(r, name);
        if (f.kind != dsl::FieldKind::classical_field) {
            r.fail("field '" + name + "' must be a classical field here");
        }
        return classical_from_source(f.source, cfg.dimension, std::nullopt, name);
    }

    [[nodiscard]] Box region(const Reader& r, const std::string& key = "region") const {
        if (!r.has(key)) {
            return cfg.domain;
        }
        const auto& j = r.at(key);
        if (j.is_string()) {
            const auto name = j.get<std::string>();
            if (name == "domain") {
                return cfg.domain;
            }
            auto it = cfg.regions.find(name);
            if (it == cfg.regions.end()) {
                r.fail("unknown region '" + name + "'");
            }
            return it->second;
        }
        return r.box(key, cfg.dimension);
    }

    [[nodiscard]] std::vector<Vec> points(const Reader& r) const {
        if (r.has("points")) {
            return r.points("points", cfg.dimension);
        }
        if (r.has("point")) {
            return {r.point("point", cfg.dimension)};
        }
        return {Vec::Zero(cfg.dimension)};
    }

    [[nodiscard]] Scale scale(const Reader& r) const {
        if (!r.has("scale")) {
            return cfg.scale();
        }
        const auto n = r.integer("scale");
        if (n < 2) {
            r.fail("'scale' must be >= 2");
        }
        return Scale(n);
    }
};

// Outcome bookkeeping shared by all checks.
void settle_label(CheckResult& res, const Expectation& e, const std::string& outcome,
                  std::optional<Relation> relation = std::nullopt) {
    res.outcome = outcome;
    if (e.kind == Expectation::Kind::none) {
        res.passed = true;
    } else if (e.kind == Expectation::Kind::label) {
        res.passed = outcome == e.label;
    } else if (e.kind == Expectation::Kind::relation) {
        res.passed = relation && e.relation_matches(*relation);
        if (relation) {
            res.outcome = to_string(*relation);
        }
    } else {
        res.passed = false;
    }
}

void settle_value(CheckResult& res, const Expectation& e, const Vec& value) {
    res.outcome = format_point(value);
    res.passed = e.kind == Expectation::Kind::none;
    if (e.kind == Expectation::Kind::value) {
        const double err = (value - e.value).cwiseAbs().maxCoeff();
        res.details["max_abs_error"] = err;
        res.passed = err <= e.tolerance;
    }
}

const std::vector<std::string> kRelationOnly{};

using CheckFn = std::function<void(const Context&, const Reader&, const Expectation&, CheckResult&, bool dry)>;

struct CheckType {
    const char* name;
    ExpectRules rules;
    CheckFn run;
};

void add_sweep(CheckResult& res, const std::string& key, const OrderVerdict& v) {
    res.details[key] = to_json(v);
    res.tables.emplace_back(key, sweep_csv(v));
}

// =============================================================================
// Checks
// =============================================================================

const std::vector<CheckType>& check_types() {
    static const std::vector<CheckType> types{
        {"bracket_at",
         {{}, false, true},
         [](const Context& c, const Reader& r, const Expectation& e, CheckResult& res, bool dry) {
             const auto names = r.names("fields", 2);
             const auto F = c.family(r, names[0]);
             const auto G = c.family(r, names[1]);
             const Vec p = r.point("point", c.cfg.dimension);
             const Scale s = c.scale(r);
             if (dry) {
                 return;
             }
             const auto f = F(s);
             const auto g = G(s);
             const Vec value = lie_bracket(f, g)(p);
             res.details["scale_n"] = s.n_inverse();
             res.details["point"] = to_json(p);
             res.details["commutator"] = to_json(commutator(f, g)(p));
             res.details["bracket"] = to_json(value);
             settle_value(res, e, value);
         }},
        {"bracket_prevector",
         {{"prevector", "not_prevector"}, true, false},
         [](const Context& c, const Reader& r, const Expectation& e, CheckResult& res, bool dry) {
             const auto names = r.names("fields", 2);
             const auto F = c.family(r, names[0]);
             const auto G = c.family(r, names[1]);
             const auto pts = c.points(r);
             if (dry) {
                 return;
             }
             const auto v = check_bracket_prevector(F, G, pts, c.cfg.plan);
             add_sweep(res, "sweep", v);
             settle_label(res, e, v.bounded() ? "prevector" : "not_prevector", v.relation);
         }},
        {"bracket_equivalence",
         {{"equivalent", "not_equivalent"}, true, false},
         [](const Context& c, const Reader& r, const Expectation& e, CheckResult& res, bool dry) {
             const auto names = r.names("fields", 3);
             const auto F = c.family(r, names[0]);
             const auto G = c.family(r, names[1]);
             const auto H = c.family(r, names[2]);
             const auto pts = c.points(r);
             if (dry) {
                 return;
             }
             const auto v = check_bracket_equivalence(F, G, H, pts, c.cfg.plan);
             const Scale s = c.cfg.scale();
             Json rows = Json::array();
             const auto fg = lie_bracket(F(s), G(s));
             const auto fh = lie_bracket(F(s), H(s));
             for (const auto& p : pts) {
                 rows.push_back({{"point", to_json(p)}, {"first", to_json(fg(p))}, {"second", to_json(fh(p))}});
             }
             res.details["brackets_at_scale"] = rows;
             add_sweep(res, "sweep", v);
             settle_label(res, e, v.relation == Relation::prec_prec ? "equivalent" : "not_equivalent", v.relation);
         }},
        {"bracket_classical",
         {{}, true, false},
         [](const Context& c, const Reader& r, const Expectation& e, CheckResult& res, bool dry) {
             const auto names = r.names("fields", 2);
             const auto X = c.classical(r, names[0]);
             const auto Y = c.classical(r, names[1]);
             const auto F = c.family(r, names[0]);
             const auto G = c.family(r, names[1]);
             const auto pts = c.points(r);
             std::optional<double> h;
             if (r.has("h")) {
                 h = r.number("h");
             }
             if (dry) {
                 return;
             }
             const auto rep = check_bracket_realizes_classical(F, G, X, Y, pts, c.cfg.plan, h);
             res.details["report"] = to_json(rep);
             Json limits = Json::array();
             for (const auto& p : pts) {
                 limits.push_back(to_json(classical_bracket_flow_limit(X, Y, p, 1e-3)));
             }
             res.details["flow_limit"] = limits;
             Relation worst = Relation::prec_prec;
             for (const auto& v : rep.verdicts) {
                 if (v.relation != Relation::prec_prec) {
                     worst = v.relation;
                     break;
                 }
             }
             for (std::size_t i = 0; i < rep.verdicts.size(); ++i) {
                 res.tables.emplace_back("point" + std::to_string(i), sweep_csv(rep.verdicts[i]));
             }
             settle_label(res, e, to_string(worst), worst);
         }},
        {"regularity",
         {{}, true, false},
         [](const Context& c, const Reader& r, const Expectation& e, CheckResult& res, bool dry) {
             const auto F = c.family(r, r.str("field"));
             const Box region = c.region(r);
             const auto property = r.str("property", "d1");
             SweepOptions opt{static_cast<int>(r.integer("samples", 64)), c.cfg.seed};
             if (property != "prevector" && property != "d1" && property != "d2") {
                 r.fail("'property' must be prevector, d1 or d2");
             }
             if (dry) {
                 return;
             }
             const auto v = property == "prevector" ? check_prevector(F, region, c.cfg.plan, opt)
                            : property == "d1"      ? check_d1(F, region, c.cfg.plan, opt)
                                                    : check_d2(F, region, c.cfg.plan, opt);
             res.details["estimate"] =
                 to_json(estimate_constants(F(c.cfg.scale()), region, opt.num_samples, opt.seed, property == "d2"));
             add_sweep(res, "sweep", v);
             settle_label(res, e, to_string(v.relation), v.relation);
         }},
        {"equivalence",
         {{"equivalent", "not_equivalent"}, true, false},
         [](const Context& c, const Reader& r, const Expectation& e, CheckResult& res, bool dry) {
             const auto names = r.names("fields", 2);
             const auto F = c.family(r, names[0]);
             const auto G = c.family(r, names[1]);
             const Box region = c.region(r);
             SweepOptions opt{static_cast<int>(r.integer("samples", 64)), c.cfg.seed};
             if (dry) {
                 return;
             }
             const auto v = check_equivalence(F, G, region, c.cfg.plan, opt);
             add_sweep(res, "sweep", v);
             settle_label(res, e, v.relation == Relation::prec_prec ? "equivalent" : "not_equivalent", v.relation);
         }},
        {"commutation",
         {{"commuting", "not_commuting"}, false, false},
         [](const Context& c, const Reader& r, const Expectation& e, CheckResult& res, bool dry) {
             const auto names = r.names("fields", 2);
             const auto F = c.family(r, names[0]);
             const auto G = c.family(r, names[1]);
             const Box region = c.region(r);
             const Rational T = r.rational("T", Rational(1));
             CommutationOptions opt{static_cast<int>(r.integer("grid", 8)), static_cast<int>(r.integer("samples", 5)),
                                    c.cfg.seed};
             if (dry) {
                 return;
             }
             const auto rep = check_commutation(F, G, region, T, c.cfg.plan, opt);
             res.details["flows"] = to_json(rep.flows);
             res.details["bracket"] = to_json(rep.bracket);
             res.details["agree"] = rep.agree;
             res.tables.emplace_back("flows", sweep_csv(rep.flows));
             res.tables.emplace_back("bracket", sweep_csv(rep.bracket));
             const std::string outcome = !rep.agree ? "disagree" : rep.commuting() ? "commuting" : "not_commuting";
             settle_label(res, e, outcome);
         }},
        {"flow",
         {{"completed", "exited"}, false, true},
         [](const Context& c, const Reader& r, const Expectation& e, CheckResult& res, bool dry) {
             const auto F = c.family(r, r.str("field"));
             const Vec a = r.point("point", c.cfg.dimension);
             const Rational t = r.rational("t");
             const int steps = static_cast<int>(r.integer("steps", 16));
             const Scale s = c.scale(r);
             if (t.is_negative()) {
                 r.fail("'t' must be non-negative for a recorded trajectory");
             }
             if (dry) {
                 return;
             }
             const auto traj = trajectory(F(s), a, time_grid(t, steps));
             res.details["scale_n"] = s.n_inverse();
             res.details["trajectory"] = to_json(traj);
             res.tables.emplace_back("trajectory", trajectory_csv(traj, c.cfg.dimension));
             if (e.kind == Expectation::Kind::value) {
                 if (traj.exit) {
                     res.outcome = "exited";
                     res.passed = false;
                 } else {
                     settle_value(res, e, traj.states.back());
                 }
             } else {
                 settle_label(res, e, traj.exit ? "exited" : "completed");
             }
         }},
        {"standard_flow",
         {{}, false, true},
         [](const Context& c, const Reader& r, const Expectation& e, CheckResult& res, bool dry) {
             const auto F = c.family(r, r.str("field"));
             const Vec a = r.point("point", c.cfg.dimension);
             const Rational t = r.rational("t");
             if (dry) {
                 return;
             }
             Json per_scale = Json::array();
             for (const auto& s : c.cfg.plan.scales()) {
                 per_scale.push_back({{"scale_n", s.n_inverse()}, {"state", to_json(flow(F(s), a, t))}});
             }
             res.details["per_scale"] = per_scale;
             const Vec v = standard_flow(F, a, t, c.cfg.plan);
             res.details["shadow"] = to_json(v);
             settle_value(res, e, v);
         }},
        {"flow_bounds",
         {{"satisfied", "violated"}, false, false},
         [](const Context& c, const Reader& r, const Expectation& e, CheckResult& res, bool dry) {
             const auto F = c.family(r, r.str("field"));
             const Vec a = r.point("a", c.cfg.dimension);
             const Vec b = r.point("b", c.cfg.dimension);
             const Rational T = r.rational("T", Rational(1));
             const int steps = static_cast<int>(r.integer("steps", 16));
             if (dry) {
                 return;
             }
             int violations = 0;
             Json per_scale = Json::array();
             for (const auto& s : c.cfg.plan.scales()) {
                 const auto rep = verify_contraction_bounds(F(s), a, b, T, steps, 64, c.cfg.seed);
                 violations += rep.violations();
                 per_scale.push_back({{"scale_n", s.n_inverse()}, {"report", to_json(rep)}});
                 res.tables.emplace_back("n" + std::to_string(s.n_inverse()), bounds_csv(rep));
             }
             res.details["violations"] = violations;
             res.details["per_scale"] = per_scale;
             settle_label(res, e, violations == 0 ? "satisfied" : "violated");
         }},
        {"compare_flows",
         {{"satisfied", "violated"}, false, false},
         [](const Context& c, const Reader& r, const Expectation& e, CheckResult& res, bool dry) {
             const auto names = r.names("fields", 2);
             const auto F = c.family(r, names[0]);
             const auto G = c.family(r, names[1]);
             const Vec a = r.point("point", c.cfg.dimension);
             const Rational T = r.rational("T", Rational(1));
             const int steps = static_cast<int>(r.integer("steps", 16));
             std::optional<double> beta;
             if (r.has("beta")) {
                 beta = r.number("beta");
             }
             if (dry) {
                 return;
             }
             int violations = 0;
             Json per_scale = Json::array();
             for (const auto& s : c.cfg.plan.scales()) {
                 const auto rep = compare_flows(F(s), G(s), a, T, steps, beta, 64, c.cfg.seed);
                 violations += rep.violations();
                 per_scale.push_back({{"scale_n", s.n_inverse()}, {"report", to_json(rep)}});
                 res.tables.emplace_back("n" + std::to_string(s.n_inverse()), bounds_csv(rep));
             }
             res.details["violations"] = violations;
             res.details["per_scale"] = per_scale;
             settle_label(res, e, violations == 0 ? "satisfied" : "violated");
         }},
        {"linearization",
         {{"satisfied", "violated"}, false, false},
         [](const Context& c, const Reader& r, const Expectation& e, CheckResult& res, bool dry) {
             const auto F = c.family(r, r.str("field"));
             const auto pts = c.points(r);
             const Rational t = r.rational("t", Rational(1));
             const int steps = static_cast<int>(r.integer("steps", 4));
             if (dry) {
                 return;
             }
             int violations = 0;
             Json rows = Json::array();
             for (const auto& s : c.cfg.plan.scales()) {
                 const auto f = F(s);
                 const auto n_max = s.steps(t);
                 for (const auto& p : pts) {
                     for (int j = 1; j <= steps; ++j) {
                         const auto chk = check_linearization(f, p, n_max * j / steps, 64, c.cfg.seed);
                         violations += chk.satisfied ? 0 : 1;
                         Json row = to_json(chk);
                         row["scale_n"] = s.n_inverse();
                         row["point"] = to_json(p);
                         rows.push_back(row);
                     }
                 }
             }
             res.details["violations"] = violations;
             res.details["rows"] = rows;
             settle_label(res, e, violations == 0 ? "satisfied" : "violated");
         }},
        {"canonical",
         {{}, true, false},
         [](const Context& c, const Reader& r, const Expectation& e, CheckResult& res, bool dry) {
             const auto F = c.family(r, r.str("field"));
             const Box region = c.region(r);
             const int samples = static_cast<int>(r.integer("samples", 16));
             const int divisor = static_cast<int>(r.integer("fine_divisor", 256));
             if (dry) {
                 return;
             }
             const auto v = check_canonical(F, region, c.cfg.plan, samples, c.cfg.seed, divisor);
             add_sweep(res, "sweep", v);
             settle_label(res, e, to_string(v.relation), v.relation);
         }},
        {"invariance",
         {{"equivalent", "not_equivalent"}, false, false},
         [](const Context& c, const Reader& r, const Expectation& e, CheckResult& res, bool dry) {
             const auto X = c.classical(r, r.str("field"));
             const Box region = c.region(r);
             Reader t(r.at("transition"), r.where() + ".transition");
             const int dim = c.cfg.dimension;
             const auto fwd = t.str("forward");
             const auto inv = t.str("inverse");
             const Box domain = t.box("domain", dim);
             const Box codomain = t.box("codomain", dim);
             t.done();
             const auto forward = map_from_source(fwd, dim, dsl::FieldKind::transition);
             const auto inverse = map_from_source(inv, dim, dsl::FieldKind::transition);
             if (!codomain.contains(region)) {
                 r.fail("region must lie inside the transition codomain");
             }
             if (dry) {
                 return;
             }
             TransitionFamily T = [=](const Scale& s) { return Transition(forward, inverse, domain, codomain, s); };
             res.details["round_trip_error"] = T(c.cfg.scale()).round_trip_error(region.samples(32, c.cfg.seed));
             const auto rep = check_invariance(X, T, region, c.cfg.plan, {64, c.cfg.seed});
             add_sweep(res, "equivalence", rep.equivalence);
             add_sweep(res, "d1_original", rep.d1_original);
             add_sweep(res, "d1_conjugated", rep.d1_conjugated);
             settle_label(res, e, rep.invariant() ? "equivalent" : "not_equivalent");
         }},
        {"straighten",
         {{"straightened", "not_straightened"}, false, false},
         [](const Context& c, const Reader& r, const Expectation& e, CheckResult& res, bool dry) {
             const auto& list = r.at("fields");
             if (!list.is_array() || list.empty()) {
                 r.fail("'fields' must be a non-empty array of classical field names");
             }
             std::vector<ClassicalField> fields;
             for (const auto& n : list) {
                 if (!n.is_string()) {
                     r.fail("'fields' must contain strings");
                 }
                 fields.push_back(c.classical(r, n.get<std::string>()));
             }
             const Vec p = r.point("point", c.cfg.dimension);
             const Box region = c.region(r);
             StraightenOptions opt;
             opt.radius = r.number("radius", opt.radius);
             opt.grid_per_axis = static_cast<int>(r.integer("grid", opt.grid_per_axis));
             if (dry) {
                 return;
             }
             const auto st = straighten(fields, p, region, c.cfg.plan, opt);
             res.details["gram_determinant"] = st.gram_determinant;
             res.details["complementary_axes"] = st.complementary_axes;
             Json verdicts = Json::array();
             bool ok = true;
             for (std::size_t i = 0; i < st.verdicts.size(); ++i) {
                 verdicts.push_back(to_json(st.verdicts[i]));
                 res.tables.emplace_back("field" + std::to_string(i), sweep_csv(st.verdicts[i]));
                 ok = ok && st.verdicts[i].relation == Relation::prec_prec;
             }
             res.details["verdicts"] = verdicts;
             double round_trip = 0.0;
             for (const auto& theta : st.chart.domain().grid(3, 0.05)) {
                 round_trip = std::max(round_trip, (st.chart.inverse(st.chart.forward(theta)) - theta).norm());
             }
             res.details["inverse_round_trip"] = round_trip;
             settle_label(res, e, ok ? "straightened" : "not_straightened");
         }},
        {"pendulum",
         {{"harmonic", "not_harmonic"}, false, false},
         [](const Context& c, const Reader& r, const Expectation& e, CheckResult& res, bool dry) {
             PendulumParams params;
             params.omega = r.number("omega", 1.0);
             if (r.has("amplitudes")) {
                 const auto& a = r.at("amplitudes");
                 if (!a.is_array() || a.empty()) {
                     r.fail("'amplitudes' must be a non-empty array");
                 }
                 params.amplitudes.clear();
                 for (const auto& x : a) {
                     params.amplitudes.push_back(r.to_rational(x, "amplitudes"));
                 }
             }
             params.horizon = r.rational("T", params.horizon);
             params.scale = Scale(r.integer("scale", params.scale.n_inverse()));
             const double tol = r.number("tolerance", 0.01);
             params.validate();
             if (dry) {
                 return;
             }
             const auto rep = run_pendulum(params, c.cfg.plan);
             res.details["report"] = to_json(rep);
             res.tables.emplace_back("trajectory", pendulum_csv(rep));
             const bool ok = rep.decreasing && rep.deviations.back() <= tol &&
                             rep.g_vs_e.relation == Relation::prec_prec && rep.e_vs_h.relation == Relation::prec_prec;
             settle_label(res, e, ok ? "harmonic" : "not_harmonic");
         }},
        {"rescaled_compare",
         {{}, true, false},
         [](const Context& c, const Reader& r, const Expectation& e, CheckResult& res, bool dry) {
             const auto names = r.names("fields", 2);
             const auto F = c.family(r, names[0]);
             const auto G = c.family(r, names[1]);
             const Vec p = r.point("point", c.cfg.dimension);
             const Vec u = r.point("direction", c.cfg.dimension);
             const Rational amplitude = r.rational("amplitude");
             const Rational t = r.rational("t");
             const int steps = static_cast<int>(r.integer("steps", 16));
             if (dry) {
                 return;
             }
             const Scale s = c.cfg.scale();
             const auto v = rescaled_compare(F(s), G(s), p, u, amplitude, t, c.cfg.plan, steps);
             add_sweep(res, "sweep", v);
             settle_label(res, e, to_string(v.relation), v.relation);
         }},
    };
    return types;
}

const CheckType& find_check(const Reader& r, const std::string& type) {
    for (const auto& t : check_types()) {
        if (type == t.name) {
            return t;
        }
    }
    r.fail("unknown check type '" + type + "'");
}

// Parses the common keys and runs the check body (dry or for real).
CheckResult execute(const Context& ctx, const Json& j, std::size_t index, bool dry) {
    Reader r(j, "checks[" + std::to_string(index) + "]");
    CheckResult res;
    res.type = r.str("type");
    res.id = r.str("id", res.type + "_" + std::to_string(index));
    (void)r.str("description", "");
    const auto& type = find_check(r, res.type);
    const auto expectation = read_expectation(r, type.rules, ctx.cfg.dimension);
    res.expectation = r.has("expect") ? r.at("expect") : Json();

    if (dry) {
        try {
            type.run(ctx, r, expectation, res, true);
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(r.where() + ": " + e.what());
        }
        r.done();
        return res;
    }
    try {
        type.run(ctx, r, expectation, res, false);
        if (expectation.kind == Expectation::Kind::error) {
            res.passed = false;
            res.message = "expected error " + expectation.error + " was not raised";
        }
    } catch (const Error& e) {
        if (expectation.kind == Expectation::Kind::error && expectation.error == to_string(e.kind())) {
            res.passed = true;
            res.outcome = std::string("error:") + to_string(e.kind());
            res.message = e.what();
        } else {
            res.passed = false;
            res.error = e.kind();
            res.outcome = std::string("error:") + to_string(e.kind());
            res.message = e.what();
        }
    }
    return res;
}

}  // namespace

// =============================================================================
// Public API
// =============================================================================

ScenarioConfig parse_scenario(const Json& doc) {
    Reader root(doc, "scenario");
    ScenarioConfig cfg;
    cfg.schema_version = static_cast<int>(root.integer("schema_version"));
    if (cfg.schema_version != kScenarioSchemaVersion) {
        root.fail("unsupported schema_version " + std::to_string(cfg.schema_version) + " (this build reads " +
                  std::to_string(kScenarioSchemaVersion) + ")");
    }
    cfg.name = root.str("name");
    if (cfg.name.empty() || cfg.name.find_first_of("/\\") != std::string::npos) {
        root.fail("'name' must be a non-empty file-name-safe string");
    }
    (void)root.str("description", "");
    cfg.dimension = static_cast<int>(root.integer("dimension"));
    if (cfg.dimension < 1 || cfg.dimension > 16) {
        root.fail("'dimension' must be between 1 and 16");
    }
    cfg.plan = read_plan(root);
    const auto seed = root.integer("seed", 1);
    if (seed < 0) {
        root.fail("'seed' must be non-negative");
    }
    cfg.seed = static_cast<std::uint64_t>(seed);
    cfg.domain = root.has("domain") ? root.box("domain", cfg.dimension) : Box::centered(cfg.dimension, 2.0);
    if (root.has("regions")) {
        const auto& regions = root.at("regions");
        if (!regions.is_object()) {
            root.fail("'regions' must be an object of boxes");
        }
        for (const auto& [k, v] : regions.items()) {
            cfg.regions.emplace(k, root.box(v, cfg.dimension, "regions." + k));
        }
    }
    const auto& fields = root.at("fields");
    if (!fields.is_object()) {
        root.fail("'fields' must be an object");
    }
    for (const auto& [k, v] : fields.items()) {
        cfg.fields.emplace(k, read_field(k, v, cfg.dimension));
    }
    const auto& checks = root.at("checks");
    if (!checks.is_array() || checks.empty()) {
        root.fail("'checks' must be a non-empty array");
    }
    for (const auto& c : checks) {
        cfg.checks.push_back(c);
    }
    root.done();

    const Context ctx{cfg};
    std::set<std::string> ids;
    for (std::size_t i = 0; i < cfg.checks.size(); ++i) {
        const auto res = execute(ctx, cfg.checks[i], i, true);
        if (!ids.insert(res.id).second) {
            throw ConfigError("duplicate check id '" + res.id + "'");
        }
    }
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read scenario file '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    Json doc;
    try {
        doc = Json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
    }
    return parse_scenario(doc);
}

void apply_overrides(ScenarioConfig& cfg, const Overrides& o) {
    if (o.scale) {
        if (!is_power_of_two(*o.scale) || *o.scale < 2) {
            throw ConfigError("--scale must be a power of two >= 2");
        }
        cfg.plan.base_scale = Scale(*o.scale);
    }
    if (o.sweep_points) {
        cfg.plan.num_points = *o.sweep_points;
    }
    if (o.seed) {
        cfg.seed = *o.seed;
    }
    cfg.plan.validate();
}

bool ScenarioResult::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

bool ScenarioResult::computation_error() const {
    return std::any_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.error.has_value(); });
}

int ScenarioResult::exit_code() const {
    if (computation_error()) {
        return kExitComputationError;
    }
    return all_passed() ? kExitOk : kExitExpectationFailed;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
    const Context ctx{cfg};
    ScenarioResult out;
    out.name = cfg.name;
    // Checks share nothing mutable, so they run in batches of worker threads;
    // results are merged in file order, keeping reports deterministic.
    const std::size_t workers = std::max(1U, std::thread::hardware_concurrency());
    for (std::size_t start = 0; start < cfg.checks.size(); start += workers) {
        const std::size_t end = std::min(cfg.checks.size(), start + workers);
        if (end - start == 1) {
            out.checks.push_back(execute(ctx, cfg.checks[start], start, false));
            continue;
        }
        std::vector<std::future<CheckResult>> batch;
        for (std::size_t i = start; i < end; ++i) {
            batch.push_back(std::async(std::launch::async, [&ctx, &cfg, i] { return execute(ctx, cfg.checks[i], i, false); }));
        }
        for (auto& f : batch) {
            out.checks.push_back(f.get());
        }
    }
    return out;
}

Json report_json(const ScenarioConfig& cfg, const ScenarioResult& result, bool with_timestamp) {
    Json checks = Json::array();
    for (const auto& c : result.checks) {
        Json j = {{"id", c.id},
                  {"type", c.type},
                  {"expect", c.expectation},
                  {"outcome", c.outcome},
                  {"passed", c.passed}};
        if (c.error) {
            j["error"] = to_string(*c.error);
        }
        if (!c.message.empty()) {
            j["message"] = c.message;
        }
        j["details"] = c.details;
        checks.push_back(j);
    }
    Json out = {{"schema_version", kReportSchemaVersion}, {"scenario", cfg.name}};
    if (with_timestamp) {
        out["generated_at"] = utc_timestamp();
    }
    out["dimension"] = cfg.dimension;
    out["seed"] = cfg.seed;
    out["sweep"] = to_json(cfg.plan);
    out["tolerances_note"] =
        "relations are decided by log-log slope fits with the stated slope_tolerance and strict_margin";
    out["all_passed"] = result.all_passed();
    out["exit_code"] = result.exit_code();
    out["checks"] = checks;
    return out;
}

std::vector<std::string> emit_reports(const ScenarioConfig& cfg, const ScenarioResult& result, const std::string& dir,
                                      ReportFormat format) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory '" + dir + "': " + ec.message());
    }
    const std::filesystem::path base(dir);
    std::vector<std::string> written;
    if (format == ReportFormat::json) {
        const auto path = (base / (cfg.name + ".json")).string();
        write_text(path, report_json(cfg, result).dump(2) + "\n");
        written.push_back(path);
        return written;
    }
    std::ostringstream summary;
    summary << "id,type,outcome,passed\n";
    for (const auto& c : result.checks) {
        summary << c.id << ',' << c.type << ',' << c.outcome << ',' << (c.passed ? 1 : 0) << '\n';
        for (const auto& [suffix, csv] : c.tables) {
            const auto path = (base / (cfg.name + "_" + c.id + "_" + suffix + ".csv")).string();
            write_text(path, csv);
            written.push_back(path);
        }
    }
    const auto path = (base / (cfg.name + "_summary.csv")).string();
    write_text(path, summary.str());
    written.insert(written.begin(), path);
    return written;
}

std::string summary_text(const ScenarioResult& result) {
    std::ostringstream out;
    for (const auto& c : result.checks) {
        out << (c.passed ? "PASS " : "FAIL ") << c.id << " (" << c.type << "): " << c.outcome;
        if (!c.message.empty()) {
            out << " [" << c.message << "]";
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace prevec
