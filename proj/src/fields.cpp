#include "prevec/fields.hpp"

#include "prevec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace prevec {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Differences this small relative to the points involved are rounding, not
// signal; they are excluded from the quotient statistics.
double rounding_floor(const Vec& a, const Vec& fa) { return 32.0 * kEps * (1.0 + a.norm() + fa.norm()); }

[[noreturn]] void outside(const char* what, const Vec& a, const Box& box) {
    throw DomainExit(std::string(what) + " " + format_point(a) + " outside " + box.to_string());
}

}  // namespace

const char* to_string(Smoothness s) {
    switch (s) {
        case Smoothness::lipschitz: return "lipschitz";
        case Smoothness::c1: return "c1";
        case Smoothness::c2: return "c2";
        case Smoothness::ck: return "ck";
    }
    return "c2";
}

Vec ClassicalField::at(const Vec& a) const {
    if (!domain.contains(a)) {
        outside("field evaluated at", a, domain);
    }
    return map(a);
}

PrevectorField::PrevectorField(VectorMap map, Box domain, Box range, Scale scale, std::string name)
    : map_(std::move(map)),
      domain_(std::move(domain)),
      range_(std::move(range)),
      scale_(scale),
      name_(std::move(name)) {
    if (domain_.dimension() != range_.dimension()) {
        throw ConfigError("prevector field domain and range differ in dimension");
    }
}

Vec PrevectorField::operator()(const Vec& a) const {
    if (!domain_.contains(a)) {
        outside("point", a, domain_);
    }
    return map_(a);
}

PrevectorField PrevectorField::with_domain(Box domain) const {
    PrevectorField out = *this;
    out.domain_ = std::move(domain);
    out.cached_.reset();
    return out;
}

// =============================================================================
// Construction
// =============================================================================

PrevectorField realize_classical(const ClassicalField& X, const Scale& s, const Box& domain, std::optional<Box> range) {
    if (!X.domain.contains(domain)) {
        throw DomainExit("realization domain " + domain.to_string() + " not inside field domain " +
                         X.domain.to_string());
    }
    Box rng = range.value_or(X.domain);
    const double lambda = s.lambda();
    auto map = [X, lambda](const Vec& a) -> Vec { return a + lambda * X.map(a); };

    auto probes = domain.samples(64, 0);
    for (auto& p : domain.grid(5)) {
        probes.push_back(std::move(p));
    }
    for (const auto& a : probes) {
        const Vec fa = map(a);
        if (!rng.contains(fa)) {
            throw RangeOverflow("image " + format_point(fa) + " of " + format_point(a) + " leaves range " +
                                rng.to_string());
        }
    }
    return {map, domain, std::move(rng), s, X.name};
}

FieldFamily realize_family(ClassicalField X, Box domain, std::optional<Box> range) {
    return [X = std::move(X), domain = std::move(domain), range = std::move(range)](const Scale& s) {
        return realize_classical(X, s, domain, range);
    };
}

PrevectorField identity_field(const Box& domain, const Scale& s) {
    return {[](const Vec& a) { return a; }, domain, domain, s, "identity"};
}

PrevectorField compose(const PrevectorField& F, const PrevectorField& G) {
    auto map = [F, G](const Vec& a) { return F(G(a)); };
    return {map, G.domain(), F.range(), G.scale(), F.name() + " o " + G.name()};
}

double resolvable_tolerance(const Vec& a) { return 4.0 * kEps * (1.0 + a.norm()); }

PrevectorField invert(const PrevectorField& F, std::optional<double> tol) {
    const double requested = tol.value_or(F.lambda() * 1e-10);
    if (!(requested > 0.0)) {
        throw ConfigError("inverse tolerance must be positive");
    }
    auto map = [F, requested](const Vec& a) -> Vec {
        const double t = std::max(requested, resolvable_tolerance(a));
        Vec y = a;
        for (int step = 0; step <= 100; ++step) {
            const Vec r = a - F(y);
            if (r.norm() <= t) {
                return y;
            }
            y += r;
        }
        throw InverseDiverged("inverse iteration did not reach tolerance " + format_double(t) + " at " +
                              format_point(a) + " within 100 steps");
    };
    return {map, F.domain(), F.range(), F.scale(), F.name().empty() ? "" : F.name() + "^-1"};
}

Vec finite_difference(const VectorMap& F, const Vec& a, const std::vector<Vec>& vs) {
    if (vs.empty()) {
        throw ConfigError("finite difference needs k >= 1 directions");
    }
    for (const auto& v : vs) {
        if (v.size() != a.size()) {
            throw ConfigError("finite difference direction has the wrong dimension");
        }
        if (v.isZero(0.0)) {
            return Vec::Zero(a.size());
        }
    }
    const std::size_t k = vs.size();
    Vec sum = Vec::Zero(a.size());
    for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
        Vec corner = a;
        int ones = 0;
        for (std::size_t i = 0; i < k; ++i) {
            if ((mask >> i) & 1U) {
                corner += vs[i];
                ++ones;
            }
        }
        if (ones % 2 == 0) {
            sum += F(corner);
        } else {
            sum -= F(corner);
        }
    }
    return sum;
}

Vec finite_difference(const PrevectorField& F, const Vec& a, const std::vector<Vec>& vs) {
    return finite_difference([&F](const Vec& x) { return F(x); }, a, vs);
}

Vec displacement_difference(const PrevectorField& F, const Vec& a, const std::vector<Vec>& vs) {
    return finite_difference([&F](const Vec& x) { return F.displacement(x); }, a, vs);
}

// =============================================================================
// Estimation
// =============================================================================

namespace {

std::uint64_t pair_seed(std::uint64_t seed) { return seed ^ 0x9E3779B97F4A7C15ULL; }

void add_pairs(const Vec& a, const Box& domain, double lambda, std::mt19937_64& rng,
               std::vector<std::pair<Vec, Vec>>& out) {
    const int n = static_cast<int>(a.size());
    const Vec b = a + lambda * sample_unit_ball(n, rng);
    if (domain.contains(b) && b != a) {
        out.emplace_back(a, b);
    }
    for (int i = 0; i < n; ++i) {
        for (double sign : {1.0, -1.0}) {
            Vec c = a;
            c[i] += sign * lambda;
            if (domain.contains(c)) {
                out.emplace_back(a, c);
            }
        }
    }
}

}  // namespace

std::vector<std::pair<Vec, Vec>> sample_pairs(const Box& region, const Box& domain, double lambda, int num_samples,
                                              std::uint64_t seed) {
    std::vector<std::pair<Vec, Vec>> out;
    std::mt19937_64 rng(pair_seed(seed));
    for (const auto& a : region.samples(static_cast<std::size_t>(num_samples), seed)) {
        if (domain.contains(a)) {
            add_pairs(a, domain, lambda, rng, out);
        }
    }
    return out;
}

RegularityEstimate estimate_constants(const PrevectorField& F, const Box& region, int num_samples, std::uint64_t seed,
                                      bool want_d2, const std::vector<Vec>& extra_points) {
    if (num_samples < 2) {
        throw ConfigError("estimate_constants needs at least 2 samples");
    }
    const double lambda = F.lambda();
    const Box& domain = F.domain();
    const int n = F.dimension();

    std::vector<Vec> points;
    for (auto& a : region.samples(static_cast<std::size_t>(num_samples), seed)) {
        if (domain.contains(a)) {
            points.push_back(std::move(a));
        }
    }
    for (const auto& a : extra_points) {
        if (domain.contains(a)) {
            points.push_back(a);
        }
    }

    RegularityEstimate est;
    est.region = region;
    est.num_samples = num_samples;
    est.seed = seed;

    std::mt19937_64 rng(pair_seed(seed));
    std::vector<std::pair<Vec, Vec>> pairs;
    for (const auto& a : points) {
        est.C_hat = std::max(est.C_hat, F.displacement(a).norm() / lambda);
        add_pairs(a, domain, lambda, rng, pairs);
    }
    for (const auto& [a, b] : pairs) {
        const Vec fa = F(a);
        const Vec fb = F(b);
        const Vec diff = (fa - a) - (fb - b);
        if (diff.norm() <= rounding_floor(a, fa)) {
            continue;
        }
        est.K_hat = std::max(est.K_hat, diff.norm() / (lambda * (a - b).norm()));
    }

    if (want_d2) {
        double k2 = 0.0;
        std::mt19937_64 rng2(pair_seed(seed) + 1);
        for (const auto& a : points) {
            std::vector<std::pair<Vec, Vec>> dirs;
            dirs.emplace_back(lambda * sample_unit_ball(n, rng2), lambda * sample_unit_ball(n, rng2));
            for (int i = 0; i < n; ++i) {
                for (int j = i; j < n; ++j) {
                    dirs.emplace_back(lambda * Vec::Unit(n, i), lambda * Vec::Unit(n, j));
                }
            }
            for (const auto& [v, w] : dirs) {
                if (!domain.contains(Vec(a + v)) || !domain.contains(Vec(a + w)) || !domain.contains(Vec(a + v + w))) {
                    continue;
                }
                if (v.isZero(0.0) || w.isZero(0.0)) {
                    continue;
                }
                const Vec d2 = finite_difference(F, a, {v, w});
                if (d2.norm() <= rounding_floor(a, F(a))) {
                    continue;
                }
                k2 = std::max(k2, d2.norm() / (lambda * v.norm() * w.norm()));
            }
        }
        est.K2_hat = k2;
    }
    return est;
}

// =============================================================================
// Sweeps
// =============================================================================

OrderVerdict check_prevector(const FieldFamily& F, const Box& region, const SweepPlan& plan, const SweepOptions& opt) {
    const auto points = region.samples(static_cast<std::size_t>(opt.num_samples), opt.seed);
    auto samples = sweep(plan, [&](const Scale& s) {
        const auto f = F(s);
        double m = 0.0;
        for (const auto& a : points) {
            m = std::max(m, f.displacement(a).norm());
        }
        return m;
    });
    return assess(samples, 1.0, plan);
}

OrderVerdict check_equivalence(const FieldFamily& F, const FieldFamily& G, const Box& region, const SweepPlan& plan,
                               const SweepOptions& opt) {
    const auto points = region.samples(static_cast<std::size_t>(opt.num_samples), opt.seed);
    auto samples = sweep(plan, [&](const Scale& s) {
        const auto f = F(s);
        const auto g = G(s);
        double m = 0.0;
        for (const auto& a : points) {
            m = std::max(m, (f(a) - g(a)).norm());
        }
        return m;
    });
    return assess(samples, 1.0, plan);
}

double apply_field(const ClassicalField& X, const ScalarMap& h, const Vec& a, double step) {
    const Vec x = X(a);
    if (x.isZero(0.0)) {
        return 0.0;
    }
    auto g = [&](double t) { return h(a + t * x); };
    return (-g(2 * step) + 8 * g(step) - 8 * g(-step) + g(-2 * step)) / (12 * step);
}

OrderVerdict check_realization(const FieldFamily& F, const ClassicalField& X, const std::vector<ScalarMap>& probes,
                               const std::vector<Vec>& points, const SweepPlan& plan) {
    if (probes.empty() || points.empty()) {
        throw ConfigError("check_realization needs at least one probe and one point");
    }
    std::vector<double> xh;
    for (const auto& a : points) {
        for (const auto& h : probes) {
            xh.push_back(apply_field(X, h, a));
        }
    }
    auto samples = sweep(plan, [&](const Scale& s) {
        const auto f = F(s);
        double m = 0.0;
        std::size_t k = 0;
        for (const auto& a : points) {
            const Vec fa = f(a);
            for (const auto& h : probes) {
                m = std::max(m, std::abs(xh[k++] - (h(fa) - h(a)) / s.lambda()));
            }
        }
        return m;
    });
    return assess(samples, 0.0, plan);
}

OrderVerdict check_d1(const FieldFamily& F, const Box& region, const SweepPlan& plan, const SweepOptions& opt) {
    auto samples = sweep(plan, [&](const Scale& s) {
        const auto f = F(s);
        return estimate_constants(f, region, opt.num_samples, opt.seed, false).K_hat * s.lambda();
    });
    return assess(samples, 1.0, plan);
}

OrderVerdict check_d2(const FieldFamily& F, const Box& region, const SweepPlan& plan, const SweepOptions& opt) {
    auto samples = sweep(plan, [&](const Scale& s) {
        const auto f = F(s);
        return *estimate_constants(f, region, opt.num_samples, opt.seed, true).K2_hat * s.lambda();
    });
    return assess(samples, 1.0, plan);
}

}  // namespace prevec
