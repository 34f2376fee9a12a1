// prevec: command-line front end. Every subcommand is a one-check scenario run
// through the same machinery as `scenario run <file>`.

#include "prevec/catalog.hpp"
#include "prevec/errors.hpp"
#include "prevec/flow.hpp"
#include "prevec/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using prevec::Json;

constexpr const char* kExitCodes =
    "Exit codes:\n"
    "  0  every check matched its expectation\n"
    "  1  a check ran but did not match its expectation\n"
    "  2  configuration error (bad flags, config file or DSL source)\n"
    "  3  computation error (domain exit, divergence, singular Jacobian, ...)\n"
    "  4  I/O error (unreadable config, unwritable output directory)\n";

struct Common {
    std::int64_t scale = 64;
    int sweep = 4;
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "json";
    int dimension = 2;
    std::string kind = "classical_field";
    std::string expect;
    std::string region;
};

std::vector<double> split_numbers(const std::string& text) {
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
        } catch (const std::exception&) {
            throw prevec::ConfigError("not a number list: '" + text + "'");
        }
    }
    return out;
}

Json point_json(const std::string& text, int dim) {
    const auto v = split_numbers(text);
    if (static_cast<int>(v.size()) != dim) {
        throw prevec::ConfigError("point '" + text + "' needs " + std::to_string(dim) + " coordinates");
    }
    return Json(v);
}

/// "h" is the box [-h, h]^n; "lo:hi" gives both corners as comma lists.
Json region_json(const std::string& text, int dim) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        const auto h = split_numbers(text);
        if (h.size() != 1 || !(h[0] > 0)) {
            throw prevec::ConfigError("region '" + text + "' must be a positive half-width or lo:hi");
        }
        return {{"lo", std::vector<double>(dim, -h[0])}, {"hi", std::vector<double>(dim, h[0])}};
    }
    return {{"lo", point_json(text.substr(0, colon), dim)}, {"hi", point_json(text.substr(colon + 1), dim)}};
}

/// "rotation" or "rotation:w=2,cx=0.5" names a catalog entry; anything else is
/// DSL source of the kind given by --kind.
Json field_json(const std::string& text, const Common& c) {
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    bool is_catalog = false;
    for (const auto& e : prevec::catalog()) {
        is_catalog = is_catalog || e.name == head;
    }
    if (!is_catalog) {
        return {{"source", text}, {"kind", c.kind}};
    }
    Json params = Json::object();
    if (colon != std::string::npos) {
        std::stringstream in(text.substr(colon + 1));
        std::string item;
        while (std::getline(in, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) {
                throw prevec::ConfigError("catalog parameter '" + item + "' must look like name=value");
            }
            const auto v = split_numbers(item.substr(eq + 1));
            if (v.size() != 1) {
                throw prevec::ConfigError("catalog parameter '" + item + "' needs one number");
            }
            params[item.substr(0, eq)] = v[0];
        }
    }
    return {{"catalog", head}, {"params", params}};
}

Json expectation_json(const std::string& text) {
    if (text.empty()) {
        return nullptr;
    }
    if (text.rfind("error:", 0) == 0) {
        return {{"error", text.substr(6)}};
    }
    return text;
}

struct Builder {
    const Common& c;
    Json doc;

    Builder(const Common& common, const std::string& name) : c(common) {
        doc = {{"schema_version", prevec::kScenarioSchemaVersion},
               {"name", name},
               {"dimension", c.dimension},
               {"scale", c.scale},
               {"sweep", {{"points", c.sweep}}},
               {"seed", c.seed},
               {"fields", Json::object()},
               {"checks", Json::array()}};
        if (!c.region.empty()) {
            doc["domain"] = region_json(c.region, c.dimension);
        }
    }

    std::vector<std::string> add_fields(const std::vector<std::string>& specs) {
        std::vector<std::string> names;
        for (std::size_t i = 0; i < specs.size(); ++i) {
            const std::string name = std::string(1, static_cast<char>('F' + i));
            doc["fields"][name] = field_json(specs[i], c);
            names.push_back(name);
        }
        return names;
    }

    void add_check(Json check) {
        const auto e = expectation_json(c.expect);
        if (!e.is_null()) {
            check["expect"] = e;
        }
        doc["checks"].push_back(std::move(check));
    }
};

/// Runs a parsed scenario and writes the report: to `--out` when given (with
/// a one-line summary per check on stdout), otherwise to stdout.
int finish(const prevec::ScenarioConfig& cfg, const Common& c) {
    const auto result = prevec::run_scenario(cfg);
    const auto format = c.format == "csv" ? prevec::ReportFormat::csv : prevec::ReportFormat::json;
    if (!c.out.empty()) {
        for (const auto& path : prevec::emit_reports(cfg, result, c.out, format)) {
            std::cerr << "wrote " << path << '\n';
        }
        std::cout << prevec::summary_text(result);
    } else if (format == prevec::ReportFormat::json) {
        std::cout << prevec::report_json(cfg, result).dump(2) << '\n';
    } else {
        std::cout << "id,type,outcome,passed\n";
        for (const auto& chk : result.checks) {
            std::cout << chk.id << ',' << chk.type << ',' << chk.outcome << ',' << (chk.passed ? 1 : 0) << '\n';
        }
    }
    return result.exit_code();
}

void install_progress() {
    prevec::default_flow_options().progress = [](std::int64_t done, std::int64_t total) {
        std::cerr << "flow: " << done << " / " << total << " iterations\n";
    };
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Prevector fields at a concrete infinitesimal scale lambda = 1/N.", "prevec"};
    app.footer(kExitCodes);
    app.require_subcommand(1);

    Common c;
    app.add_option("--scale", c.scale, "Base scale N (power of two), lambda = 1/N")->capture_default_str();
    app.add_option("--sweep", c.sweep, "Number of sweep points (scales N, 2N, 4N, ...)")->capture_default_str();
    app.add_option("--seed", c.seed, "Seed for all sampling")->capture_default_str();
    app.add_option("--out", c.out, "Write reports to this directory instead of stdout");
    app.add_option("--format", c.format, "Report format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app.add_option("--dim", c.dimension, "Dimension for DSL sources and catalog fields")->capture_default_str();
    app.add_option("--kind", c.kind, "Kind of DSL sources given inline")
        ->check(CLI::IsMember({"classical_field", "displacement_map"}))
        ->capture_default_str();
    app.add_option("--expect", c.expect, "Expected outcome; \"error:Kind\" expects an error. Omit to only report");
    app.add_option("--domain", c.region, "Field domain: half-width h or lo:hi, e.g. --domain=-1,-1:1,1");

    auto common_sub = [&](const std::string& name, const std::string& help) {
        auto* s = app.add_subcommand(name, help);
        s->fallthrough();
        return s;
    };

    Json check;
    std::vector<std::string> fields;

    // regularity
    std::string property = "d1";
    std::string region;
    auto* reg = common_sub("regularity", "Sweep the prevector, D1 or D2 estimate of a field");
    reg->add_option("field", fields, "Catalog name (name:k=v,...) or DSL source")->required()->expected(1);
    reg->add_option("--property", property, "prevector | d1 | d2")
        ->check(CLI::IsMember({"prevector", "d1", "d2"}))
        ->capture_default_str();
    reg->add_option("--region", region, "Sample region (default: domain)");

    // flow
    std::string point;
    std::string t = "1";
    int steps = 16;
    bool shadow = false;
    auto* fl = common_sub("flow", "Iterate a field to time t");
    fl->add_option("field", fields, "Field")->required()->expected(1);
    fl->add_option("--point", point, "Start point, comma separated")->required();
    fl->add_option("--t", t, "Time (rational, e.g. 355/452)")->capture_default_str();
    fl->add_option("--steps", steps, "Recorded time steps")->capture_default_str();
    fl->add_flag("--shadow", shadow, "Extrapolate the standard flow over the sweep instead");

    // equiv
    auto* eq = common_sub("equiv", "Equivalence sweep of two fields");
    eq->add_option("fields", fields, "Two fields")->required()->expected(2);
    eq->add_option("--region", region, "Sample region (default: domain)");

    // bracket
    bool classical = false;
    bool prevector = false;
    auto* br = common_sub("bracket", "Lie bracket of two fields");
    br->add_option("fields", fields, "Two fields")->required()->expected(2);
    br->add_option("--point", point, "Evaluation point")->required();
    br->add_flag("--classical", classical, "Sweep against the classical bracket of classical fields");
    br->add_flag("--prevector", prevector, "Sweep whether the bracket is a prevector field");

    // commute
    int grid = 8;
    auto* cm = common_sub("commute", "Flow commutation and bracket triviality, side by side");
    cm->add_option("fields", fields, "Two fields")->required()->expected(2);
    cm->add_option("--T", t, "Time horizon")->capture_default_str();
    cm->add_option("--grid", grid, "Time grid points per axis")->capture_default_str();
    cm->add_option("--region", region, "Region for sample points; flows must stay in the domain")
        ->default_str("0.5");

    // straighten
    double radius = 0.25;
    auto* st = common_sub("straighten", "Chart in which commuting fields are coordinate fields");
    st->add_option("fields", fields, "Classical fields")->required()->expected(1, 16);
    st->add_option("--point", point, "Base point")->required();
    st->add_option("--radius", radius, "Half-width of the flow-time box")->capture_default_str();

    // pendulum
    double omega = 1.0;
    std::string amplitudes = "1/10,1/100,1/1000";
    std::string horizon = "5";
    std::int64_t pscale = 16384;
    double tolerance = 0.01;
    auto* pe = common_sub("pendulum", "Rescaled pendulum against harmonic motion");
    pe->add_option("--omega", omega, "Angular frequency")->capture_default_str();
    pe->add_option("--amplitudes", amplitudes, "Amplitudes (rationals), comma separated")->capture_default_str();
    pe->add_option("--T", horizon, "Horizon")->capture_default_str();
    pe->add_option("--pendulum-scale", pscale, "Scale N of the amplitude sweep")->capture_default_str();
    pe->add_option("--tolerance", tolerance, "Bound on the deviation at the smallest amplitude")->capture_default_str();

    // scenario run
    std::string file;
    auto* sc = common_sub("scenario", "Run scenario files");
    sc->require_subcommand(1);
    auto* sr = sc->add_subcommand("run", "Run every check in a scenario file");
    sr->fallthrough();
    sr->add_option("file", file, "Scenario JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? prevec::kExitOk : prevec::kExitConfigError;
    }

    install_progress();
    try {
        if (sc->parsed()) {
            prevec::Overrides o;
            if (app.count("--scale") > 0) {
                o.scale = c.scale;
            }
            if (app.count("--sweep") > 0) {
                o.sweep_points = c.sweep;
            }
            if (app.count("--seed") > 0) {
                o.seed = c.seed;
            }
            auto cfg = prevec::load_scenario(file);
            prevec::apply_overrides(cfg, o);
            return finish(cfg, c);
        }

        const std::string sub = app.get_subcommands().front()->get_name();
        Builder b(c, sub);
        if (reg->parsed()) {
            b.add_fields(fields);
            check = {{"type", "regularity"}, {"field", "F"}, {"property", property}};
        } else if (fl->parsed()) {
            b.add_fields(fields);
            check = {{"type", shadow ? "standard_flow" : "flow"}, {"field", "F"},
                     {"point", point_json(point, c.dimension)}, {"t", t}};
            if (!shadow) {
                check["steps"] = steps;
            }
        } else if (eq->parsed()) {
            check = {{"type", "equivalence"}, {"fields", b.add_fields(fields)}};
        } else if (br->parsed()) {
            const auto names = b.add_fields(fields);
            const auto p = point_json(point, c.dimension);
            if (classical) {
                check = {{"type", "bracket_classical"}, {"fields", names}, {"points", Json::array({p})}};
            } else if (prevector) {
                check = {{"type", "bracket_prevector"}, {"fields", names}, {"points", Json::array({p})}};
            } else {
                check = {{"type", "bracket_at"}, {"fields", names}, {"point", p}};
            }
        } else if (cm->parsed()) {
            check = {{"type", "commutation"}, {"fields", b.add_fields(fields)}, {"T", t}, {"grid", grid}};
            if (region.empty()) {
                region = "0.5";
            }
        } else if (st->parsed()) {
            check = {{"type", "straighten"},
                     {"fields", b.add_fields(fields)},
                     {"point", point_json(point, c.dimension)},
                     {"radius", radius}};
        } else if (pe->parsed()) {
            Json amps = Json::array();
            std::stringstream in(amplitudes);
            std::string item;
            while (std::getline(in, item, ',')) {
                amps.push_back(item);
            }
            check = {{"type", "pendulum"}, {"omega", omega}, {"amplitudes", amps},
                     {"T", horizon},      {"scale", pscale}, {"tolerance", tolerance}};
        }
        if (!region.empty()) {
            check["region"] = region_json(region, c.dimension);
        }
        b.add_check(check);
        return finish(prevec::parse_scenario(b.doc), c);
    } catch (const prevec::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return prevec::kExitConfigError;
    } catch (const prevec::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return prevec::kExitIoError;
    } catch (const prevec::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return prevec::kExitComputationError;
    }
}
