#pragma once

// =============================================================================
// Order calculus
// =============================================================================
// The relations r < s ("r/s stays bounded") and r << s ("r/s vanishes") are
// asymptotic statements about an infinitesimal scale. Here the scale is a
// concrete lambda = 1/N and the relations are decided from a decreasing
// sequence of scales: fit the log-log slope of a magnitude against lambda and
// compare it with the exponent under test.
// =============================================================================

#include "prevec/geometry.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace prevec {

/// lambda = 1/N with integer N >= 2.
class Scale {
public:
    explicit Scale(std::int64_t n_inverse);

    [[nodiscard]] std::int64_t n_inverse() const { return n_; }
    [[nodiscard]] double lambda() const { return 1.0 / static_cast<double>(n_); }
    [[nodiscard]] Rational lambda_exact() const { return {1, n_}; }
    [[nodiscard]] bool is_power_of_two() const { return (n_ & (n_ - 1)) == 0; }

    /// floor(t / lambda), computed exactly.
    [[nodiscard]] std::int64_t steps(const Rational& t) const { return t.floor_times(n_); }

    friend bool operator==(const Scale& a, const Scale& b) { return a.n_ == b.n_; }

private:
    std::int64_t n_;
};

/// Geometric sequence lambda_k = lambda_0 / ratio^k, k = 0..num_points-1.
struct SweepPlan {
    Scale base_scale{64};
    int num_points = 4;
    int ratio = 2;
    double slope_tolerance = 0.15;
    double strict_margin = 0.5;
    /// Magnitudes at or below this absolute level are treated as exact zeros
    /// (floating-point residue, not signal).
    double zero_threshold = 1e-11;

    /// Throws ConfigError if the plan is malformed.
    void validate() const;
    [[nodiscard]] std::vector<Scale> scales() const;
    [[nodiscard]] Scale finest() const;
};

struct OrderSample {
    double lambda = 0.0;
    double magnitude = 0.0;
};

/// Least-squares fit of log(magnitude) against log(lambda).
struct OrderFit {
    std::vector<OrderSample> points;
    double slope = 0.0;
    double intercept = 0.0;
    /// Every magnitude was zero; slope is meaningless and the relation is <<.
    bool all_zero = false;
    /// Points with magnitude above the zero threshold that entered the fit.
    int fitted_points = 0;
    double zero_threshold = 0.0;

    /// magnitude_k / lambda_k^p for the points that entered the fit.
    [[nodiscard]] std::vector<double> ratios(double p) const;
    [[nodiscard]] double max_ratio(double p) const;
    [[nodiscard]] double min_ratio(double p) const;
};

enum class Relation { prec, prec_prec, approx, fails, inconclusive };

const char* to_string(Relation r);
Relation relation_from_string(const std::string& name);

struct OrderVerdict {
    Relation relation = Relation::inconclusive;
    double tested_exponent = 0.0;
    OrderFit fit;

    /// prec_prec or approx: the magnitude vanishes faster than lambda^p.
    [[nodiscard]] bool strictly_smaller() const {
        return relation == Relation::prec_prec || relation == Relation::approx;
    }
    /// prec or stronger.
    [[nodiscard]] bool bounded() const { return relation == Relation::prec || strictly_smaller(); }
};

/// Throws TooFewPoints (< 2 samples, or fewer than two distinct scales among
/// the nonzero ones) and AllZero.
OrderFit fit_order(const std::vector<OrderSample>& samples, double zero_threshold = 0.0);

OrderVerdict judge(const OrderFit& fit, double p, const SweepPlan& plan);

/// fit_order + judge; an all-zero sweep is reported as prec_prec.
OrderVerdict assess(const std::vector<OrderSample>& samples, double p, const SweepPlan& plan);

/// "v approx w": prec_prec against p = 0, reported as Relation::approx.
OrderVerdict assess_approx(const std::vector<OrderSample>& samples, const SweepPlan& plan);

/// Evaluate `magnitude` at every scale of the plan.
std::vector<OrderSample> sweep(const SweepPlan& plan, const std::function<double(const Scale&)>& magnitude);

struct VectorSample {
    double lambda = 0.0;
    Vec value;
};

/// Standard part by first-order Richardson extrapolation to lambda -> 0 using
/// the two finest samples. Falls back to the finest value when the linear
/// model misses the third-finest sample by more than the observed spread.
/// Throws Diverging when successive differences grow as lambda shrinks.
Vec shadow(std::vector<VectorSample> samples);

}  // namespace prevec
