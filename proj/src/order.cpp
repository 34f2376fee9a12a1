#include "prevec/order.hpp"

#include "prevec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace prevec {

Scale::Scale(std::int64_t n_inverse) : n_(n_inverse) {
    if (n_inverse < 2) {
        throw ConfigError("scale requires N >= 2, got " + std::to_string(n_inverse));
    }
}

void SweepPlan::validate() const {
    if (num_points < 4) {
        throw ConfigError("sweep needs at least 4 points");
    }
    if (ratio < 2) {
        throw ConfigError("sweep ratio must be an integer >= 2");
    }
    if (!(slope_tolerance >= 0.0) || !(strict_margin > slope_tolerance)) {
        throw ConfigError("sweep requires 0 <= slope_tolerance < strict_margin");
    }
    (void)scales();
}

std::vector<Scale> SweepPlan::scales() const {
    std::vector<Scale> out;
    std::int64_t n = base_scale.n_inverse();
    for (int k = 0; k < num_points; ++k) {
        out.emplace_back(n);
        if (k + 1 < num_points) {
            if (n > std::numeric_limits<std::int64_t>::max() / ratio) {
                throw ConfigError("sweep scale overflow");
            }
            n *= ratio;
        }
    }
    return out;
}

Scale SweepPlan::finest() const { return scales().back(); }

// =============================================================================
// Fit
// =============================================================================

std::vector<double> OrderFit::ratios(double p) const {
    std::vector<double> out;
    for (const auto& s : points) {
        if (s.magnitude > zero_threshold && s.magnitude > 0.0) {
            out.push_back(s.magnitude / std::pow(s.lambda, p));
        }
    }
    return out;
}

double OrderFit::max_ratio(double p) const {
    const auto r = ratios(p);
    return r.empty() ? 0.0 : *std::max_element(r.begin(), r.end());
}

double OrderFit::min_ratio(double p) const {
    const auto r = ratios(p);
    return r.empty() ? 0.0 : *std::min_element(r.begin(), r.end());
}

const char* to_string(Relation r) {
    switch (r) {
        case Relation::prec: return "prec";
        case Relation::prec_prec: return "prec_prec";
        case Relation::approx: return "approx";
        case Relation::fails: return "fails";
        case Relation::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

Relation relation_from_string(const std::string& name) {
    for (auto r : {Relation::prec, Relation::prec_prec, Relation::approx, Relation::fails, Relation::inconclusive}) {
        if (name == to_string(r)) {
            return r;
        }
    }
    throw ConfigError("unknown relation '" + name + "'");
}

OrderFit fit_order(const std::vector<OrderSample>& samples, double zero_threshold) {
    if (samples.size() < 2) {
        throw TooFewPoints("order fit needs at least 2 samples");
    }
    std::set<double> scales;
    for (const auto& s : samples) {
        if (!(s.lambda > 0.0) || !(s.magnitude >= 0.0) || !std::isfinite(s.magnitude)) {
            throw ConfigError("order samples need lambda > 0 and finite magnitude >= 0");
        }
        scales.insert(s.lambda);
    }
    if (scales.size() != samples.size()) {
        throw TooFewPoints("order fit needs distinct scales");
    }

    OrderFit fit;
    fit.points = samples;
    fit.zero_threshold = zero_threshold;
    double sx = 0;
    double sy = 0;
    double sxx = 0;
    double sxy = 0;
    int m = 0;
    for (auto& s : fit.points) {
        if (s.magnitude <= zero_threshold || s.magnitude == 0.0) {
            continue;
        }
        const double x = std::log(s.lambda);
        const double y = std::log(s.magnitude);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    fit.fitted_points = m;
    if (m == 0) {
        throw AllZero("every magnitude in the sweep is zero");
    }
    if (m < 2) {
        throw TooFewPoints("fewer than two nonzero magnitudes in the sweep");
    }
    const double denom = m * sxx - sx * sx;
    fit.slope = (m * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / m;
    return fit;
}

OrderVerdict judge(const OrderFit& fit, double p, const SweepPlan& plan) {
    OrderVerdict v;
    v.tested_exponent = p;
    v.fit = fit;
    if (fit.all_zero) {
        v.relation = Relation::prec_prec;
        return v;
    }
    const bool ratios_finite = std::isfinite(fit.max_ratio(p)) && std::isfinite(fit.min_ratio(p));
    if (fit.slope >= p + plan.strict_margin) {
        v.relation = Relation::prec_prec;
    } else if (fit.slope >= p - plan.slope_tolerance && ratios_finite) {
        v.relation = Relation::prec;
    } else if (fit.slope <= p - plan.strict_margin) {
        v.relation = Relation::fails;
    } else {
        v.relation = Relation::inconclusive;
    }
    return v;
}

OrderVerdict assess(const std::vector<OrderSample>& samples, double p, const SweepPlan& plan) {
    try {
        return judge(fit_order(samples, plan.zero_threshold), p, plan);
    } catch (const AllZero&) {
        OrderFit fit;
        fit.points = samples;
        fit.zero_threshold = plan.zero_threshold;
        fit.all_zero = true;
        return judge(fit, p, plan);
    } catch (const TooFewPoints&) {
        if (samples.size() < 2) {
            throw;
        }
        // A lone nonzero magnitude among zeros: no slope can be fitted.
        OrderVerdict v;
        v.tested_exponent = p;
        v.fit.points = samples;
        v.fit.fitted_points = 1;
        v.fit.slope = std::numeric_limits<double>::quiet_NaN();
        v.fit.zero_threshold = plan.zero_threshold;
        v.relation = Relation::inconclusive;
        return v;
    }
}

OrderVerdict assess_approx(const std::vector<OrderSample>& samples, const SweepPlan& plan) {
    auto v = assess(samples, 0.0, plan);
    if (v.relation == Relation::prec_prec) {
        v.relation = Relation::approx;
    }
    return v;
}

std::vector<OrderSample> sweep(const SweepPlan& plan, const std::function<double(const Scale&)>& magnitude) {
    std::vector<OrderSample> out;
    for (const auto& s : plan.scales()) {
        out.push_back({s.lambda(), magnitude(s)});
    }
    return out;
}

// =============================================================================
// Shadow
// =============================================================================

Vec shadow(std::vector<VectorSample> samples) {
    if (samples.size() < 2) {
        throw TooFewPoints("shadow needs at least 2 samples");
    }
    std::sort(samples.begin(), samples.end(),
              [](const VectorSample& a, const VectorSample& b) { return a.lambda > b.lambda; });
    const auto dim = samples.front().value.size();
    for (const auto& s : samples) {
        if (s.value.size() != dim || !s.value.allFinite()) {
            throw ConfigError("shadow samples must be finite and of equal dimension");
        }
    }
    const std::size_t m = samples.size();
    const auto& fine = samples[m - 1];
    const auto& coarse = samples[m - 2];

    // Successive differences must not grow as lambda shrinks.
    if (m >= 3) {
        for (Eigen::Index i = 0; i < dim; ++i) {
            bool growing = true;
            double first = std::abs(samples[1].value[i] - samples[0].value[i]);
            double prev = first;
            for (std::size_t k = 2; k < m; ++k) {
                const double d = std::abs(samples[k].value[i] - samples[k - 1].value[i]);
                if (!(d > prev)) {
                    growing = false;
                }
                prev = d;
            }
            const double scale = 1.0 + std::abs(fine.value[i]);
            if (growing && prev > first * (1.0 + 1e-9) && prev > 1e-12 * scale) {
                throw Diverging("shadow: component " + std::to_string(i) + " spreads further as lambda shrinks");
            }
        }
    }

    const double w = fine.lambda / (coarse.lambda - fine.lambda);
    Vec extrapolated = fine.value + w * (fine.value - coarse.value);
    if (m >= 3) {
        const auto& third = samples[m - 3];
        // Linear model through the two finest points, evaluated at the third.
        const double slope_w = (third.lambda - fine.lambda) / (coarse.lambda - fine.lambda);
        const Vec predicted = fine.value + slope_w * (coarse.value - fine.value);
        const double residual = (predicted - third.value).cwiseAbs().maxCoeff();
        Vec lo = samples[0].value;
        Vec hi = samples[0].value;
        for (const auto& s : samples) {
            lo = lo.cwiseMin(s.value);
            hi = hi.cwiseMax(s.value);
        }
        const double spread = (hi - lo).maxCoeff();
        if (residual > spread) {
            return fine.value;
        }
    }
    return extrapolated;
}

}  // namespace prevec
