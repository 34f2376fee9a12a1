#pragma once

// JSON and CSV forms of the result types. Output is a pure function of the
// input values, so identical runs give identical bytes.

#include "prevec/bracket.hpp"
#include "prevec/fields.hpp"
#include "prevec/flow.hpp"
#include "prevec/order.hpp"
#include "prevec/pendulum.hpp"

#include <json.hpp>

#include <string>

namespace prevec {

using Json = nlohmann::ordered_json;

/// Version of the report layout; bumped on incompatible changes.
inline constexpr int kReportSchemaVersion = 1;

Json to_json(const Vec& v);
Json to_json(const Rational& r);
Json to_json(const SweepPlan& plan);
Json to_json(const OrderVerdict& v);
Json to_json(const RegularityEstimate& e);
Json to_json(const BoundReport& r);
Json to_json(const LinearizationCheck& c);
Json to_json(const BracketReport& r);
Json to_json(const CommutationReport& r);
Json to_json(const PendulumReport& r);
Json to_json(const FlowTrajectory& t);

/// lambda,magnitude,tested_exponent,ratio
std::string sweep_csv(const OrderVerdict& v);
/// t,x1..xn,iteration
std::string trajectory_csv(const FlowTrajectory& t, int dimension);
/// t,lhs,rhs,lower,satisfied
std::string bounds_csv(const BoundReport& r);
/// t,x,y,reference
std::string pendulum_csv(const PendulumReport& r);

/// Throws IoError.
void write_text(const std::string& path, const std::string& content);

/// Current UTC time, ISO 8601. Reports carry it under "generated_at", the one
/// field that golden comparisons skip.
std::string utc_timestamp();

}  // namespace prevec
