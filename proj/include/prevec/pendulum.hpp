#pragma once

// Small oscillations of the pendulum x' = w y, y' = -w sin x. In the rescaled
// coordinates x -> x / a the field becomes (w y, -w sin(a x) / a), which for
// small a is close to the harmonic oscillator (w y, -w x).

#include "prevec/fields.hpp"
#include "prevec/order.hpp"

#include <vector>

namespace prevec {

struct PendulumParams {
    double omega = 1.0;
    std::vector<Rational> amplitudes{Rational(1, 10), Rational(1, 100), Rational(1, 1000)};
    Rational horizon{5};
    Scale scale{1 << 14};

    /// Throws ConfigError unless omega > 0, every amplitude > 0, horizon >= 0.
    void validate() const;
};

struct PendulumSample {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double reference = 0.0;
};

struct PendulumReport {
    std::vector<double> amplitudes;
    /// sup over grid times t = k lambda <= T of |x(t) - cos(w t)|, rescaled field.
    std::vector<double> deviations;
    bool decreasing = false;
    /// Same quantity for the harmonic field itself: the pure lambda effect.
    double harmonic_deviation = 0.0;
    /// Rescaled field G vs Euler map E of the harmonic field, amplitude sqrt(lambda).
    OrderVerdict g_vs_e;
    /// E vs the exact rotation H by the angle lambda w.
    OrderVerdict e_vs_h;
    /// Deviation with lambda and amplitude shrinking together (a = sqrt(lambda)),
    /// judged prec_prec against p = 0.
    OrderVerdict joint;
    /// About 200 states of the smallest-amplitude run.
    std::vector<PendulumSample> trajectory;
};

/// sup_t |x(t) - cos(w t)| for the rescaled field at amplitude a and scale s,
/// starting at (1, 0). Passing a = 0 uses the harmonic field.
double pendulum_deviation(double omega, double amplitude, const Rational& horizon, const Scale& s,
                          std::vector<PendulumSample>* samples = nullptr);

PendulumReport run_pendulum(const PendulumParams& params, const SweepPlan& plan);

}  // namespace prevec
