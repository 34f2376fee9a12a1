#include "prevec/pendulum.hpp"

#include "prevec/catalog.hpp"
#include "prevec/errors.hpp"

#include <cmath>

namespace prevec {

void PendulumParams::validate() const {
    if (!(omega > 0.0) || !std::isfinite(omega)) {
        throw ConfigError("pendulum omega must be positive");
    }
    if (amplitudes.empty()) {
        throw ConfigError("pendulum needs at least one amplitude");
    }
    for (const auto& a : amplitudes) {
        if (!(Rational(0) < a)) {
            throw ConfigError("pendulum amplitudes must be positive");
        }
    }
    if (horizon.is_negative()) {
        throw ConfigError("pendulum horizon must be non-negative");
    }
}

namespace {

const Box kPendulumBox = Box::centered(2, 4.0);

ClassicalField rescaled(double omega, double amplitude) {
    const std::string src = amplitude > 0.0
                                ? catalog_source("rescaled_pendulum", 2, {{"w", omega}, {"a", amplitude}})
                                : catalog_source("harmonic", 2, {{"w", omega}});
    return classical_from_source(src, 2, std::nullopt, amplitude > 0.0 ? "rescaled pendulum" : "harmonic");
}

}  // namespace

double pendulum_deviation(double omega, double amplitude, const Rational& horizon, const Scale& s,
                          std::vector<PendulumSample>* samples) {
    const auto G = realize_classical(rescaled(omega, amplitude), s, kPendulumBox);
    const std::int64_t n = s.steps(horizon);
    const std::int64_t stride = std::max<std::int64_t>(1, n / 200);
    Vec x = vec({1.0, 0.0});
    double worst = 0.0;
    for (std::int64_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * s.lambda();
        const double ref = std::cos(omega * t);
        worst = std::max(worst, std::abs(x[0] - ref));
        if (samples && (k % stride == 0 || k == n)) {
            samples->push_back({t, x[0], x[1], ref});
        }
        if (k == n) {
            break;
        }
        x = G(x);
    }
    return worst;
}

PendulumReport run_pendulum(const PendulumParams& params, const SweepPlan& plan) {
    params.validate();
    plan.validate();
    PendulumReport report;
    for (std::size_t i = 0; i < params.amplitudes.size(); ++i) {
        const double a = params.amplitudes[i].to_double();
        const bool last = i + 1 == params.amplitudes.size();
        report.amplitudes.push_back(a);
        report.deviations.push_back(
            pendulum_deviation(params.omega, a, params.horizon, params.scale, last ? &report.trajectory : nullptr));
    }
    report.decreasing = true;
    for (std::size_t i = 1; i < report.deviations.size(); ++i) {
        if (!(report.deviations[i] < report.deviations[i - 1])) {
            report.decreasing = false;
        }
    }
    report.harmonic_deviation = pendulum_deviation(params.omega, 0.0, params.horizon, params.scale);

    const Box region = Box::centered(2, 1.0);
    const double w = params.omega;
    FieldFamily G = [w](const Scale& s) {
        return realize_classical(rescaled(w, std::sqrt(s.lambda())), s, kPendulumBox);
    };
    FieldFamily E = realize_family(rescaled(w, 0.0), kPendulumBox);
    FieldFamily H = displacement_family(catalog_source("rotation_step", 2, {{"w", w}}), 2, kPendulumBox);
    report.g_vs_e = check_equivalence(G, E, region, plan);
    report.e_vs_h = check_equivalence(E, H, region, plan);

    auto joint = sweep(plan, [&](const Scale& s) {
        return pendulum_deviation(w, std::sqrt(s.lambda()), params.horizon, s);
    });
    report.joint = assess(joint, 0.0, plan);
    return report;
}

}  // namespace prevec
