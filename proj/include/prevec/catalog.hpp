#pragma once

// Named fields. Every entry is DSL source with its parameters substituted, so
// the catalog and user-written configs go through the same parser.

#include "prevec/dsl.hpp"
#include "prevec/fields.hpp"

#include <map>
#include <string>
#include <vector>

namespace prevec {

using Params = std::map<std::string, double>;

struct CatalogEntry {
    std::string name;
    dsl::FieldKind kind;
    /// Parameter names and defaults.
    Params defaults;
    std::string description;
};

const std::vector<CatalogEntry>& catalog();
const CatalogEntry& catalog_entry(const std::string& name);

/// Source text for a catalog entry in the given dimension. Unknown parameter
/// names are a ConfigError. Most entries are two-dimensional; translation and
/// scaling accept any dimension.
std::string catalog_source(const std::string& name, int dimension, const Params& params = {});

/// Default box for classical fields built from source.
Box default_field_domain(int dimension);

/// Classical field from DSL source. `lambda` in the source is an error here
/// (a classical field does not know the scale); use a displacement map.
ClassicalField classical_from_source(const std::string& source, int dimension,
                                     std::optional<Box> domain = std::nullopt, const std::string& name = {});

/// Displacement map from DSL source, one map per scale.
FieldFamily displacement_family(const std::string& source, int dimension, Box domain, std::optional<Box> range = {},
                                const std::string& name = {});

/// Scalar probe function from DSL source.
ScalarMap probe_from_source(const std::string& source, int dimension);

/// Vector map from DSL source evaluated at a fixed lambda.
VectorMap map_from_source(const std::string& source, int dimension, dsl::FieldKind kind, double lambda = 0.0);

}  // namespace prevec
