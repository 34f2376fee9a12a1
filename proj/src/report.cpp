#include "prevec/report.hpp"

#include "prevec/errors.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

namespace prevec {

namespace {

// NaN and infinities have no JSON literal; they become null.
Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

std::string csv_number(double x) { return std::isfinite(x) ? format_double(x) : ""; }

}  // namespace

Json to_json(const Vec& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back(number(v[i]));
    }
    return out;
}

Json to_json(const Rational& r) { return r.to_string(); }

Json to_json(const SweepPlan& plan) {
    Json scales = Json::array();
    for (const auto& s : plan.scales()) {
        scales.push_back(s.n_inverse());
    }
    return {{"base_n", plan.base_scale.n_inverse()},
            {"points", plan.num_points},
            {"ratio", plan.ratio},
            {"slope_tolerance", plan.slope_tolerance},
            {"strict_margin", plan.strict_margin},
            {"zero_threshold", plan.zero_threshold},
            {"scales_n", scales}};
}

Json to_json(const OrderVerdict& v) {
    const double p = v.tested_exponent;
    Json points = Json::array();
    for (const auto& s : v.fit.points) {
        const bool fitted = s.magnitude > v.fit.zero_threshold && s.magnitude > 0.0;
        points.push_back({{"lambda", number(s.lambda)},
                          {"magnitude", number(s.magnitude)},
                          {"ratio", fitted ? number(s.magnitude / std::pow(s.lambda, p)) : Json(nullptr)},
                          {"fitted", fitted}});
    }
    return {{"relation", to_string(v.relation)},
            {"tested_exponent", p},
            {"slope", v.fit.all_zero ? Json(nullptr) : number(v.fit.slope)},
            {"intercept", v.fit.all_zero ? Json(nullptr) : number(v.fit.intercept)},
            {"all_zero", v.fit.all_zero},
            {"fitted_points", v.fit.fitted_points},
            {"max_ratio", number(v.fit.max_ratio(p))},
            {"min_ratio", number(v.fit.min_ratio(p))},
            {"zero_threshold", v.fit.zero_threshold},
            {"points", points}};
}

Json to_json(const RegularityEstimate& e) {
    return {{"C_hat", number(e.C_hat)},
            {"K_hat", number(e.K_hat)},
            {"K2_hat", e.K2_hat ? number(*e.K2_hat) : Json(nullptr)},
            {"region", {{"lo", to_json(e.region.lo())}, {"hi", to_json(e.region.hi())}}},
            {"num_samples", e.num_samples},
            {"seed", e.seed}};
}

Json to_json(const BoundReport& r) {
    Json rows = Json::array();
    for (std::size_t j = 0; j < r.times.size(); ++j) {
        Json row = {{"t", to_json(r.times[j])}, {"lhs", number(r.lhs[j])}, {"rhs", number(r.rhs[j])}};
        if (j < r.lower.size()) {
            row["lower"] = number(r.lower[j]);
        }
        row["satisfied"] = static_cast<bool>(r.satisfied[j]);
        rows.push_back(row);
    }
    return {{"K_used", number(r.K_used)},
            {"all_satisfied", r.all_satisfied()},
            {"violations", r.violations()},
            {"rows", rows}};
}

Json to_json(const LinearizationCheck& c) {
    return {{"n", c.n},
            {"deviation", number(c.deviation)},
            {"bound", number(c.bound)},
            {"K_hat", number(c.K_hat)},
            {"C_hat", number(c.C_hat)},
            {"satisfied", c.satisfied}};
}

Json to_json(const BracketReport& r) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < r.points.size(); ++i) {
        Json row = {{"point", to_json(r.points[i])}};
        if (i < r.iterated.size()) {
            row["iterated"] = to_json(r.iterated[i]);
        }
        if (i < r.scaled.size()) {
            row["scaled"] = to_json(r.scaled[i]);
        }
        if (r.classical && i < r.classical->size()) {
            row["classical"] = to_json((*r.classical)[i]);
        }
        if (i < r.verdicts.size()) {
            row["verdict"] = to_json(r.verdicts[i]);
        }
        rows.push_back(row);
    }
    return {{"rows", rows}};
}

Json to_json(const CommutationReport& r) {
    return {{"flows", to_json(r.flows)},
            {"bracket", to_json(r.bracket)},
            {"agree", r.agree},
            {"commuting", r.commuting()}};
}

Json to_json(const PendulumReport& r) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < r.amplitudes.size(); ++i) {
        rows.push_back({{"amplitude", number(r.amplitudes[i])}, {"deviation", number(r.deviations[i])}});
    }
    return {{"amplitude_sweep", rows},
            {"decreasing", r.decreasing},
            {"harmonic_deviation", number(r.harmonic_deviation)},
            {"g_vs_e", to_json(r.g_vs_e)},
            {"e_vs_h", to_json(r.e_vs_h)},
            {"joint", to_json(r.joint)}};
}

Json to_json(const FlowTrajectory& t) {
    Json rows = Json::array();
    for (std::size_t j = 0; j < t.times.size(); ++j) {
        rows.push_back({{"t", to_json(t.times[j])}, {"state", to_json(t.states[j])}, {"iteration", t.iterations[j]}});
    }
    Json out = {{"rows", rows}};
    if (t.exit) {
        out["exit"] = {{"time", to_json(t.exit->time)}, {"iteration", t.exit->iteration}, {"reason", t.exit->reason}};
    } else {
        out["exit"] = nullptr;
    }
    return out;
}

std::string sweep_csv(const OrderVerdict& v) {
    std::ostringstream out;
    out << "lambda,magnitude,tested_exponent,ratio\n";
    for (const auto& s : v.fit.points) {
        const bool fitted = s.magnitude > v.fit.zero_threshold && s.magnitude > 0.0;
        out << format_double(s.lambda) << ',' << format_double(s.magnitude) << ','
            << format_double(v.tested_exponent) << ','
            << (fitted ? csv_number(s.magnitude / std::pow(s.lambda, v.tested_exponent)) : "") << '\n';
    }
    return out.str();
}

std::string trajectory_csv(const FlowTrajectory& t, int dimension) {
    std::ostringstream out;
    out << 't';
    for (int i = 1; i <= dimension; ++i) {
        out << ",x" << i;
    }
    out << ",iteration\n";
    for (std::size_t j = 0; j < t.times.size(); ++j) {
        out << format_double(t.times[j].to_double());
        for (Eigen::Index i = 0; i < t.states[j].size(); ++i) {
            out << ',' << format_double(t.states[j][i]);
        }
        out << ',' << t.iterations[j] << '\n';
    }
    return out.str();
}

std::string bounds_csv(const BoundReport& r) {
    std::ostringstream out;
    out << "t,lhs,rhs,lower,satisfied\n";
    for (std::size_t j = 0; j < r.times.size(); ++j) {
        out << format_double(r.times[j].to_double()) << ',' << csv_number(r.lhs[j]) << ',' << csv_number(r.rhs[j])
            << ',' << (j < r.lower.size() ? csv_number(r.lower[j]) : "") << ',' << (r.satisfied[j] ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string pendulum_csv(const PendulumReport& r) {
    std::ostringstream out;
    out << "t,x,y,reference\n";
    for (const auto& s : r.trajectory) {
        out << format_double(s.t) << ',' << format_double(s.x) << ',' << format_double(s.y) << ','
            << format_double(s.reference) << '\n';
    }
    return out.str();
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << content;
    out.close();
    if (!out) {
        throw IoError("failed writing '" + path + "'");
    }
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace prevec
