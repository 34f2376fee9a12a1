#include "prevec/flow.hpp"

#include "prevec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace prevec {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

[[noreturn]] void exit_at(const Vec& x, const Box& domain, std::int64_t k) {
    throw DomainExit("iterate " + std::to_string(k) + " at " + format_point(x) + " left " + domain.to_string(), k);
}

// Box around the given points, padded by lambda and clipped to `domain`.
Box working_region(const std::vector<Vec>& points, double lambda, const Box& domain) {
    const Box b = Box::bounding(points, lambda);
    Vec lo = b.lo().cwiseMax(domain.lo());
    Vec hi = b.hi().cwiseMin(domain.hi());
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
        if (!(lo[i] < hi[i])) {
            return domain;
        }
    }
    return {lo, hi};
}

// At most `cap` evenly spaced points of an orbit.
std::vector<Vec> thin(const std::vector<Vec>& points, std::size_t cap) {
    if (points.size() <= cap) {
        return points;
    }
    std::vector<Vec> out;
    for (std::size_t i = 0; i < cap; ++i) {
        out.push_back(points[i * (points.size() - 1) / (cap - 1)]);
    }
    return out;
}

// Absolute allowance for rounding accumulated over n floating-point steps.
double rounding_allowance(std::int64_t n, const std::vector<Vec>& orbit) {
    double m = 0.0;
    for (const auto& x : orbit) {
        m = std::max(m, x.norm());
    }
    return 4.0 * kEps * static_cast<double>(n + 1) * (1.0 + m);
}

}  // namespace

FlowOptions& default_flow_options() {
    static FlowOptions options;
    return options;
}

Vec iterate(const PrevectorField& F, const Vec& a, std::int64_t n, const FlowOptions& opt) {
    const Box& domain = F.domain();
    if (!domain.contains(a)) {
        exit_at(a, domain, 0);
    }
    const bool report = opt.progress && n > opt.progress_threshold && opt.progress_every > 0;
    const VectorMap& map = F.map();
    Vec x = a;
    for (std::int64_t k = 1; k <= n; ++k) {
        try {
            x = map(x);
        } catch (const DomainExit& e) {
            // Exits inside a composite map are reported at the outer step.
            if (e.iteration()) {
                throw;
            }
            throw DomainExit(e.what(), k);
        }
        if (!domain.contains(x)) {
            exit_at(x, domain, k);
        }
        if (report && k % opt.progress_every == 0) {
            opt.progress(k, n);
        }
    }
    return x;
}

std::vector<Vec> orbit(const PrevectorField& F, const Vec& a, std::int64_t n) {
    const Box& domain = F.domain();
    if (!domain.contains(a)) {
        exit_at(a, domain, 0);
    }
    std::vector<Vec> out;
    out.reserve(static_cast<std::size_t>(n) + 1);
    out.push_back(a);
    for (std::int64_t k = 1; k <= n; ++k) {
        out.push_back(F.map()(out.back()));
        if (!domain.contains(out.back())) {
            exit_at(out.back(), domain, k);
        }
    }
    return out;
}

Vec flow(const PrevectorField& F, const Vec& a, const Rational& t, const FlowOptions& opt) {
    if (!t.is_negative()) {
        return iterate(F, a, F.scale().steps(t), opt);
    }
    const std::int64_t n = F.scale().steps(-t);
    const double tol = F.lambda() * 1e-12 / static_cast<double>(std::max<std::int64_t>(n, 1));
    return iterate(invert(F, tol), a, n, opt);
}

FlowTrajectory trajectory(const PrevectorField& F, const Vec& a, const std::vector<Rational>& times) {
    FlowTrajectory out;
    const Box& domain = F.domain();
    Vec x = a;
    std::int64_t done = 0;
    for (const auto& t : times) {
        if (t.is_negative()) {
            throw ConfigError("trajectory times must be non-negative");
        }
        const std::int64_t n = F.scale().steps(t);
        if (n < done) {
            throw ConfigError("trajectory times must be sorted ascending");
        }
        try {
            if (done == 0 && !domain.contains(x)) {
                exit_at(x, domain, 0);
            }
            for (; done < n;) {
                x = F.map()(x);
                ++done;
                if (!domain.contains(x)) {
                    exit_at(x, domain, done);
                }
            }
        } catch (const DomainExit& e) {
            const std::int64_t k = e.iteration().value_or(done);
            out.exit = FlowExit{Rational(k, F.scale().n_inverse()), k, e.what()};
            return out;
        }
        out.times.push_back(t);
        out.states.push_back(x);
        out.iterations.push_back(n);
    }
    return out;
}

std::vector<Rational> time_grid(const Rational& T, int steps) {
    if (steps < 1) {
        throw ConfigError("time grid needs at least one step");
    }
    std::vector<Rational> out;
    for (int j = 0; j <= steps; ++j) {
        out.push_back(T * Rational(j, steps));
    }
    return out;
}

Prevector flow_prevector(const PrevectorField& F, const Prevector& v, const Rational& t) {
    return {flow(F, v.base, t), flow(F, v.tip, t)};
}

Vec standard_flow(const FieldFamily& F, const Vec& a, const Rational& t, const SweepPlan& plan) {
    std::vector<VectorSample> samples;
    for (const auto& s : plan.scales()) {
        samples.push_back({s.lambda(), flow(F(s), a, t)});
    }
    return shadow(std::move(samples));
}

PrevectorField canonical_representative(const PrevectorField& F, int fine_divisor) {
    if (fine_divisor < 1) {
        throw ConfigError("fine divisor must be positive");
    }
    const double d = fine_divisor;
    auto map = [F, fine_divisor, d](const Vec& a) -> Vec {
        Vec x = a;
        for (int k = 0; k < fine_divisor; ++k) {
            x += (F(x) - x) / d;
        }
        return x;
    };
    return {map, F.domain(), F.range(), F.scale(), F.name().empty() ? "" : "canonical " + F.name()};
}

OrderVerdict check_canonical(const FieldFamily& F, const Box& region, const SweepPlan& plan, int num_samples,
                             std::uint64_t seed, int fine_divisor) {
    const auto points = region.samples(static_cast<std::size_t>(num_samples), seed);
    auto samples = sweep(plan, [&](const Scale& s) {
        const auto f = F(s);
        const auto canonical = canonical_representative(f, fine_divisor);
        double m = 0.0;
        for (const auto& a : points) {
            m = std::max(m, (canonical(a) - f(a)).norm());
        }
        return m;
    });
    return assess(samples, 1.0, plan);
}

// =============================================================================
// Bounds
// =============================================================================

bool BoundReport::all_satisfied() const {
    return std::all_of(satisfied.begin(), satisfied.end(), [](bool b) { return b; });
}

int BoundReport::violations() const {
    return static_cast<int>(std::count(satisfied.begin(), satisfied.end(), false));
}

BoundReport verify_contraction_bounds(const PrevectorField& F, const Vec& a, const Vec& b, const Rational& T, int steps,
                                      int num_samples, std::uint64_t seed) {
    const std::int64_t n = F.scale().steps(T);
    const auto oa = orbit(F, a, n);
    const auto ob = orbit(F, b, n);
    std::vector<Vec> all = oa;
    all.insert(all.end(), ob.begin(), ob.end());
    const double lambda = F.lambda();
    const Box region = working_region(all, lambda, F.domain());
    const auto est = estimate_constants(F, region, num_samples, seed, false, thin(all, 256));
    if (!(est.K_hat * lambda < 1.0)) {
        throw ConfigError("K lambda >= 1; the scale is too coarse for this field");
    }
    const double k_prime = est.K_hat / ((1.0 - est.K_hat * lambda) * (1.0 - est.K_hat * lambda));
    const double d0 = (a - b).norm();
    const double slack = rounding_allowance(n, all);

    BoundReport report;
    report.K_used = k_prime;
    for (const auto& t : time_grid(T, steps)) {
        const auto k = static_cast<std::size_t>(F.scale().steps(t));
        const double td = t.to_double();
        const double dist = (oa[k] - ob[k]).norm();
        const double upper = std::exp(k_prime * td) * d0;
        const double lower = std::exp(-k_prime * td) * d0;
        report.times.push_back(t);
        report.lhs.push_back(dist);
        report.rhs.push_back(upper);
        report.lower.push_back(lower);
        report.satisfied.push_back(dist <= upper * (1 + 1e-12) + slack && lower <= dist * (1 + 1e-12) + slack);
    }
    return report;
}

BoundReport compare_flows(const PrevectorField& F, const PrevectorField& G, const Vec& a, const Rational& T, int steps,
                          std::optional<double> beta, int num_samples, std::uint64_t seed) {
    const std::int64_t n = F.scale().steps(T);
    const auto of = orbit(F, a, n);
    const auto og = orbit(G, a, n);
    std::vector<Vec> all = of;
    all.insert(all.end(), og.begin(), og.end());
    const double lambda = F.lambda();
    const Box region = working_region(all, lambda, F.domain());
    const auto extra = thin(all, 256);
    const auto est = estimate_constants(F, region, num_samples, seed, false, extra);

    double b = 0.0;
    if (beta) {
        b = *beta;
    } else {
        auto points = region.samples(static_cast<std::size_t>(num_samples), seed);
        points.insert(points.end(), extra.begin(), extra.end());
        for (const auto& x : points) {
            if (F.domain().contains(x) && G.domain().contains(x)) {
                b = std::max(b, (F(x) - G(x)).norm() / lambda);
            }
        }
    }
    const double K = est.K_hat;
    const double slack = rounding_allowance(n, all);

    BoundReport report;
    report.K_used = K;
    for (const auto& t : time_grid(T, steps)) {
        const auto k = static_cast<std::size_t>(F.scale().steps(t));
        const double td = t.to_double();
        const double dist = (of[k] - og[k]).norm();
        const double bound = K > 0.0 ? (b / K) * std::expm1(K * td) : b * td;
        report.times.push_back(t);
        report.lhs.push_back(dist);
        report.rhs.push_back(bound);
        report.satisfied.push_back(dist <= bound * (1 + 1e-12) + slack);
    }
    return report;
}

LinearizationCheck check_linearization(const PrevectorField& F, const Vec& a, std::int64_t n, int num_samples,
                                       std::uint64_t seed) {
    if (n < 0) {
        throw ConfigError("linearization check needs n >= 0");
    }
    const auto orb = orbit(F, a, n);
    const double lambda = F.lambda();
    const Box region = working_region(orb, lambda, F.domain());
    const auto est = estimate_constants(F, region, num_samples, seed, false, thin(orb, 256));

    LinearizationCheck out;
    out.n = n;
    out.K_hat = est.K_hat;
    out.C_hat = est.C_hat;
    const double nd = static_cast<double>(n);
    out.deviation = (orb.back() - a - nd * (orb[std::min<std::size_t>(1, orb.size() - 1)] - a)).norm();
    out.bound = est.K_hat * est.C_hat * nd * nd * lambda * lambda;
    out.satisfied = out.deviation <= out.bound * (1 + 1e-9) + rounding_allowance(n, orb);
    return out;
}

OrderVerdict rescaled_compare(const PrevectorField& F, const PrevectorField& G, const Vec& p, const Vec& direction,
                              const Rational& amplitude, const Rational& t, const SweepPlan& plan, int steps) {
    if ((F(p) - p).norm() > 1e-12 || (G(p) - p).norm() > 1e-12) {
        throw ConfigError("rescaled comparison needs F(p) = G(p) = p");
    }
    if (direction.norm() == 0.0 || amplitude.is_negative() || amplitude == Rational(0)) {
        throw ConfigError("rescaled comparison needs a nonzero direction and a positive amplitude");
    }
    const Vec u = direction.normalized();
    const std::int64_t n = F.scale().steps(t);
    std::vector<OrderSample> samples;
    Rational a_k = amplitude;
    for (int k = 0; k < plan.num_points; ++k) {
        const double a = a_k.to_double();
        const Vec x = p + a * u;
        const auto of = orbit(F, x, n);
        const auto og = orbit(G, x, n);
        double m = 0.0;
        for (const auto& tj : time_grid(t, steps)) {
            const auto j = static_cast<std::size_t>(F.scale().steps(tj));
            m = std::max(m, (of[j] - og[j]).norm() / a);
        }
        samples.push_back({a, m});
        a_k = a_k / Rational(plan.ratio);
    }
    return assess(samples, 0.0, plan);
}

}  // namespace prevec
