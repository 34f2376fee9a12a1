#include "prevec/catalog.hpp"

#include "prevec/errors.hpp"

#include <set>

namespace prevec {

using dsl::FieldKind;

const std::vector<CatalogEntry>& catalog() {
    static const std::vector<CatalogEntry> entries{
        {"translation", FieldKind::classical_field, {{"v1", 1.0}}, "constant field (v1, v2, ...); vx, vy, vz alias v1..v3"},
        {"rotation", FieldKind::classical_field, {{"w", 1.0}, {"cx", 0.0}, {"cy", 0.0}},
         "( -w*(y-cy), w*(x-cx) ), rotation about (cx, cy)"},
        {"scaling", FieldKind::classical_field, {{"c", 1.0}}, "c * x in every coordinate"},
        {"affine", FieldKind::classical_field, {{"c", 1.0}, {"b", 0.0}}, "c * x + b in every coordinate"},
        {"pendulum", FieldKind::classical_field, {{"w", 1.0}}, "( w*y, -w*sin(x) )"},
        {"rescaled_pendulum", FieldKind::classical_field, {{"w", 1.0}, {"a", 0.1}}, "( w*y, -w*sin(a*x)/a )"},
        {"harmonic", FieldKind::classical_field, {{"w", 1.0}}, "( w*y, -w*x ), the linearized pendulum"},
        {"shift", FieldKind::displacement_map, {{"v1", 1.0}}, "x + lambda*v, exact translation by lambda*v"},
        {"rotation_step", FieldKind::displacement_map, {{"w", 1.0}},
         "clockwise rotation by the angle lambda*w"},
        {"osc_e2", FieldKind::displacement_map, {}, "( x, y + lambda*sin(pi*x/(2*lambda)) )"},
        {"osc_e3", FieldKind::displacement_map, {}, "( x, y + lambda^2*sin(pi*x/(2*lambda)) )"},
        {"osc_e4", FieldKind::displacement_map, {}, "same map as osc_e3"},
        {"identity", FieldKind::displacement_map, {}, "( x, y, ... )"},
    };
    return entries;
}

const CatalogEntry& catalog_entry(const std::string& name) {
    for (const auto& e : catalog()) {
        if (e.name == name) {
            return e;
        }
    }
    throw ConfigError("unknown catalog field '" + name + "'");
}

namespace {

std::string num(double x) { return "(" + format_double(x) + ")"; }

std::string var(int i, int dimension) {
    if (dimension <= 3) {
        return std::string(1, "xyz"[i]);
    }
    return "x" + std::to_string(i + 1);
}

std::string tuple(const std::vector<std::string>& parts) {
    std::string out = "( ";
    for (std::size_t i = 0; i < parts.size(); ++i) {
        out += (i > 0 ? ", " : "") + parts[i];
    }
    return out + " )";
}

// Vector parameter v1..vn with aliases vx, vy, vz.
std::vector<double> vector_param(const Params& p, int dimension) {
    std::vector<double> v(static_cast<std::size_t>(dimension), 0.0);
    v[0] = 1.0;
    for (int i = 0; i < dimension; ++i) {
        const std::string key = "v" + std::to_string(i + 1);
        if (auto it = p.find(key); it != p.end()) {
            v[static_cast<std::size_t>(i)] = it->second;
        }
        if (i < 3) {
            const std::string alias = std::string("v") + "xyz"[i];
            if (auto it = p.find(alias); it != p.end()) {
                v[static_cast<std::size_t>(i)] = it->second;
            }
        }
    }
    return v;
}

void check_params(const std::string& name, const Params& params, int dimension) {
    const auto& entry = catalog_entry(name);
    std::set<std::string> allowed;
    for (const auto& [k, _] : entry.defaults) {
        allowed.insert(k);
    }
    if (name == "translation" || name == "shift") {
        for (int i = 0; i < dimension; ++i) {
            allowed.insert("v" + std::to_string(i + 1));
            if (i < 3) {
                allowed.insert(std::string("v") + "xyz"[i]);
            }
        }
    }
    for (const auto& [k, _] : params) {
        if (allowed.count(k) == 0) {
            throw ConfigError("catalog field '" + name + "' has no parameter '" + k + "'");
        }
    }
}

double get(const std::string& name, const Params& params, const std::string& key) {
    if (auto it = params.find(key); it != params.end()) {
        return it->second;
    }
    return catalog_entry(name).defaults.at(key);
}

void require_dimension(const std::string& name, int dimension, int want) {
    if (dimension != want) {
        throw ConfigError("catalog field '" + name + "' is defined in dimension " + std::to_string(want) +
                          ", not " + std::to_string(dimension));
    }
}

bool uses_lambda(const dsl::Expr& e) {
    return std::visit(
        [](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, dsl::Lambda>) {
                return true;
            } else if constexpr (std::is_same_v<T, dsl::Negate>) {
                return uses_lambda(*n.operand);
            } else if constexpr (std::is_same_v<T, dsl::Binary>) {
                return uses_lambda(*n.lhs) || uses_lambda(*n.rhs);
            } else if constexpr (std::is_same_v<T, dsl::Call>) {
                return uses_lambda(*n.arg);
            } else {
                return false;
            }
        },
        e.node);
}

}  // namespace

std::string catalog_source(const std::string& name, int dimension, const Params& params) {
    if (dimension < 1) {
        throw ConfigError("dimension must be positive");
    }
    check_params(name, params, dimension);
    std::vector<std::string> parts;
    if (name == "translation") {
        for (double v : vector_param(params, dimension)) {
            parts.push_back(num(v));
        }
    } else if (name == "rotation") {
        require_dimension(name, dimension, 2);
        const auto w = num(get(name, params, "w"));
        parts = {"-" + w + "*(y - " + num(get(name, params, "cy")) + ")",
                 w + "*(x - " + num(get(name, params, "cx")) + ")"};
    } else if (name == "scaling") {
        for (int i = 0; i < dimension; ++i) {
            parts.push_back(num(get(name, params, "c")) + "*" + var(i, dimension));
        }
    } else if (name == "affine") {
        for (int i = 0; i < dimension; ++i) {
            parts.push_back(num(get(name, params, "c")) + "*" + var(i, dimension) + " + " +
                            num(get(name, params, "b")));
        }
    } else if (name == "pendulum") {
        require_dimension(name, dimension, 2);
        const auto w = num(get(name, params, "w"));
        parts = {w + "*y", "-" + w + "*sin(x)"};
    } else if (name == "rescaled_pendulum") {
        require_dimension(name, dimension, 2);
        const auto w = num(get(name, params, "w"));
        const auto a = num(get(name, params, "a"));
        parts = {w + "*y", "-" + w + "*sin(" + a + "*x)/" + a};
    } else if (name == "harmonic") {
        require_dimension(name, dimension, 2);
        const auto w = num(get(name, params, "w"));
        parts = {w + "*y", "-" + w + "*x"};
    } else if (name == "shift") {
        const auto v = vector_param(params, dimension);
        for (int i = 0; i < dimension; ++i) {
            parts.push_back(var(i, dimension) + " + lambda*" + num(v[static_cast<std::size_t>(i)]));
        }
    } else if (name == "rotation_step") {
        require_dimension(name, dimension, 2);
        const auto w = num(get(name, params, "w"));
        parts = {"cos(lambda*" + w + ")*x + sin(lambda*" + w + ")*y",
                 "-sin(lambda*" + w + ")*x + cos(lambda*" + w + ")*y"};
    } else if (name == "osc_e2") {
        require_dimension(name, dimension, 2);
        parts = {"x", "y + lambda*sin(pi*x/(2*lambda))"};
    } else if (name == "osc_e3" || name == "osc_e4") {
        require_dimension(name, dimension, 2);
        parts = {"x", "y + lambda^2*sin(pi*x/(2*lambda))"};
    } else if (name == "identity") {
        for (int i = 0; i < dimension; ++i) {
            parts.push_back(var(i, dimension));
        }
    } else {
        throw ConfigError("unknown catalog field '" + name + "'");
    }
    return tuple(parts);
}

Box default_field_domain(int dimension) { return Box::centered(dimension, 1e3); }

ClassicalField classical_from_source(const std::string& source, int dimension, std::optional<Box> domain,
                                     const std::string& name) {
    auto def = dsl::parse(source, dimension, FieldKind::classical_field);
    for (const auto& c : def.components) {
        if (uses_lambda(*c)) {
            throw ConfigError("classical field '" + (name.empty() ? source : name) +
                              "' refers to lambda; define it as a displacement_map instead");
        }
    }
    auto map = [def = std::move(def)](const Vec& a) { return dsl::evaluate(def, a, 0.0); };
    return {map, domain.value_or(default_field_domain(dimension)), Smoothness::ck, name};
}

FieldFamily displacement_family(const std::string& source, int dimension, Box domain, std::optional<Box> range,
                                const std::string& name) {
    auto def = dsl::parse(source, dimension, FieldKind::displacement_map);
    Box rng = range.value_or(domain);
    return [def = std::move(def), domain = std::move(domain), rng = std::move(rng), name](const Scale& s) {
        const double lambda = s.lambda();
        auto map = [def, lambda](const Vec& a) { return dsl::evaluate(def, a, lambda); };
        return PrevectorField(map, domain, rng, s, name);
    };
}

ScalarMap probe_from_source(const std::string& source, int dimension) {
    auto def = dsl::parse(source, dimension, FieldKind::scalar_probe);
    return [def = std::move(def)](const Vec& a) { return dsl::evaluate(*def.components[0], a, 0.0); };
}

VectorMap map_from_source(const std::string& source, int dimension, FieldKind kind, double lambda) {
    auto def = dsl::parse(source, dimension, kind);
    return [def = std::move(def), lambda](const Vec& a) { return dsl::evaluate(def, a, lambda); };
}

}  // namespace prevec
