#pragma once

// Scenario files: a JSON document naming fields (catalog entries or DSL
// source), a scale and sweep plan, and a list of checks with expected
// outcomes. The layout is documented in docs/config_schema.md.

#include "prevec/catalog.hpp"
#include "prevec/errors.hpp"
#include "prevec/order.hpp"
#include "prevec/report.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace prevec {

inline constexpr int kScenarioSchemaVersion = 1;

/// Process exit codes shared by the CLI and scenario runs.
enum ExitCode : int {
    kExitOk = 0,
    kExitExpectationFailed = 1,
    kExitConfigError = 2,
    kExitComputationError = 3,
    kExitIoError = 4,
};

struct FieldSpec {
    std::string name;
    dsl::FieldKind kind = dsl::FieldKind::classical_field;
    std::string source;
    /// Catalog name when the field came from the catalog.
    std::string catalog;
    /// Domain of the prevector field (classical fields are realized on it).
    std::optional<Box> domain;
    std::optional<Box> range;
};

struct ScenarioConfig {
    int schema_version = kScenarioSchemaVersion;
    std::string name;
    int dimension = 2;
    SweepPlan plan;
    std::uint64_t seed = 1;
    Box domain = Box::centered(2, 2.0);
    std::map<std::string, FieldSpec> fields;
    std::map<std::string, Box> regions;
    std::vector<Json> checks;

    /// The base scale of the sweep doubles as the scale of single-scale checks.
    [[nodiscard]] const Scale& scale() const { return plan.base_scale; }
};

/// Validates the document and every check in it (a dry run that parses all
/// parameters and DSL sources). Throws ConfigError; DSL errors are rethrown
/// as ConfigError carrying the original message.
ScenarioConfig parse_scenario(const Json& doc);

/// Reads and parses a file. Throws IoError if unreadable, ConfigError if the
/// JSON is malformed or invalid.
ScenarioConfig load_scenario(const std::string& path);

/// Command-line overrides: --scale N, --sweep m, --seed k.
struct Overrides {
    std::optional<std::int64_t> scale;
    std::optional<int> sweep_points;
    std::optional<std::uint64_t> seed;
};

void apply_overrides(ScenarioConfig& cfg, const Overrides& o);

struct CheckResult {
    std::string id;
    std::string type;
    Json expectation;
    std::string outcome;
    bool passed = false;
    /// Set when the check raised an error it did not expect.
    std::optional<ErrorKind> error;
    std::string message;
    Json details = Json::object();
    /// Extra tables: (file suffix, CSV content).
    std::vector<std::pair<std::string, std::string>> tables;
};

struct ScenarioResult {
    std::string name;
    std::vector<CheckResult> checks;

    [[nodiscard]] bool all_passed() const;
    [[nodiscard]] bool computation_error() const;
    [[nodiscard]] int exit_code() const;
};

ScenarioResult run_scenario(const ScenarioConfig& cfg);

/// Full report. The timestamp goes under "generated_at" when requested.
Json report_json(const ScenarioConfig& cfg, const ScenarioResult& result, bool with_timestamp = true);

enum class ReportFormat { json, csv };

/// Writes <dir>/<name>.json, or <dir>/<name>_summary.csv plus one CSV per
/// table. Creates `dir` if needed. Returns the written paths. Throws IoError.
std::vector<std::string> emit_reports(const ScenarioConfig& cfg, const ScenarioResult& result, const std::string& dir,
                                      ReportFormat format);

/// One line per check: "PASS id (type): outcome" or "FAIL ...".
std::string summary_text(const ScenarioResult& result);

}  // namespace prevec
