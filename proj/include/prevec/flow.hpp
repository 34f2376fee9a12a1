#pragma once

// Flows by literal iteration: F_t = F^n with n = floor(t / lambda).

#include "prevec/charts.hpp"
#include "prevec/fields.hpp"
#include "prevec/geometry.hpp"
#include "prevec/order.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace prevec {

/// Called as progress(done, total) every `progress_every` iterations of runs
/// longer than `progress_threshold` iterations.
using ProgressFn = std::function<void(std::int64_t, std::int64_t)>;

struct FlowOptions {
    ProgressFn progress;
    std::int64_t progress_threshold = 10'000'000;
    std::int64_t progress_every = 1'000'000;
};

/// Process-wide defaults used when a call does not pass its own options; the
/// CLI installs a stderr reporter here.
FlowOptions& default_flow_options();

struct FlowExit {
    Rational time;
    std::int64_t iteration = 0;
    std::string reason;
};

struct FlowTrajectory {
    std::vector<Rational> times;
    std::vector<Vec> states;
    std::vector<std::int64_t> iterations;
    std::optional<FlowExit> exit;
};

/// F^n(a), or (F^-1)^n(a) for t < 0. Throws DomainExit carrying the index of
/// the first iterate outside F's domain (a itself is iterate 0).
Vec flow(const PrevectorField& F, const Vec& a, const Rational& t, const FlowOptions& opt = default_flow_options());

/// F^n(a) for an explicit iteration count.
Vec iterate(const PrevectorField& F, const Vec& a, std::int64_t n, const FlowOptions& opt = default_flow_options());

/// Every iterate F^0(a) .. F^n(a). Throws DomainExit like `iterate`.
std::vector<Vec> orbit(const PrevectorField& F, const Vec& a, std::int64_t n);

/// States at the given non-negative times (sorted ascending). A domain exit is
/// recorded in `exit` and ends the trajectory.
FlowTrajectory trajectory(const PrevectorField& F, const Vec& a, const std::vector<Rational>& times);

/// Times j T / steps for j = 0..steps.
std::vector<Rational> time_grid(const Rational& T, int steps);

/// (F_t(a), F_t(x)) for v = (a, x).
Prevector flow_prevector(const PrevectorField& F, const Prevector& v, const Rational& t);

/// Shadow of F_t(a) over the sweep.
Vec standard_flow(const FieldFamily& F, const Vec& a, const Rational& t, const SweepPlan& plan);

/// F~(a): the map a -> a + (F(a) - a) / d iterated d times.
PrevectorField canonical_representative(const PrevectorField& F, int fine_divisor = 256);

/// max over samples of |F~(a) - F(a)|, judged against p = 1; prec_prec means
/// the canonical representative is equivalent to F.
OrderVerdict check_canonical(const FieldFamily& F, const Box& region, const SweepPlan& plan, int num_samples = 16,
                             std::uint64_t seed = 1, int fine_divisor = 256);

// =============================================================================
// Bounds
// =============================================================================

struct BoundReport {
    double K_used = 0.0;
    std::vector<Rational> times;
    std::vector<double> lhs;
    std::vector<double> rhs;
    /// Lower bound, when the check has one.
    std::vector<double> lower;
    std::vector<bool> satisfied;

    [[nodiscard]] bool all_satisfied() const;
    [[nodiscard]] int violations() const;
};

/// e^{-K't} |a - b| <= |F_t(a) - F_t(b)| <= e^{K't} |a - b| at times j T / steps,
/// with K' = K/(1 - K lambda)^2 and K estimated on the box around both orbits.
BoundReport verify_contraction_bounds(const PrevectorField& F, const Vec& a, const Vec& b, const Rational& T, int steps,
                                      int num_samples = 64, std::uint64_t seed = 1);

/// |F_t(a) - G_t(a)| <= (beta/K)(e^{Kt} - 1). beta defaults to the sampled
/// max |F - G| / lambda and K to K_hat of F, both on the box around both orbits.
BoundReport compare_flows(const PrevectorField& F, const PrevectorField& G, const Vec& a, const Rational& T, int steps,
                          std::optional<double> beta = std::nullopt, int num_samples = 64, std::uint64_t seed = 1);

struct LinearizationCheck {
    double deviation = 0.0;
    double bound = 0.0;
    double K_hat = 0.0;
    double C_hat = 0.0;
    std::int64_t n = 0;
    bool satisfied = false;
};

/// |F^n(a) - a - n(F(a) - a)| against K C n^2 lambda^2 (1 + 1e-9), with K and C
/// estimated on the box around the orbit (orbit points included).
LinearizationCheck check_linearization(const PrevectorField& F, const Vec& a, std::int64_t n, int num_samples = 64,
                                       std::uint64_t seed = 1);

/// Sweep over amplitudes amplitude / ratio^k (k < plan.num_points): start at
/// p + a_k u, take max over the time grid of |F_t(x) - G_t(x)| / a_k, judge
/// prec_prec against p = 0. Requires F(p) = G(p) = p within 1e-12.
OrderVerdict rescaled_compare(const PrevectorField& F, const PrevectorField& G, const Vec& p, const Vec& direction,
                              const Rational& amplitude, const Rational& t, const SweepPlan& plan, int steps = 16);

}  // namespace prevec
