#include "prevec/bracket.hpp"

#include "prevec/errors.hpp"

#include <algorithm>
#include <cmath>

namespace prevec {

PrevectorField commutator(const PrevectorField& F, const PrevectorField& G, std::optional<double> tol) {
    const double lambda = F.lambda();
    const double t = tol.value_or(lambda * lambda * lambda);
    const auto Finv = invert(F, t);
    const auto Ginv = invert(G, t);
    auto map = [F, G, Finv, Ginv](const Vec& a) { return Ginv(Finv(G(F(a)))); };
    return {map, F.domain(), F.range(), F.scale(), "[" + F.name() + ", " + G.name() + "] core"};
}

PrevectorField lie_bracket(const PrevectorField& F, const PrevectorField& G, std::optional<double> tol) {
    const auto H = commutator(F, G, tol);
    const std::int64_t n = F.scale().n_inverse();
    auto map = [H, n](const Vec& a) { return iterate(H, a, n); };
    return {map, F.domain(), F.range(), F.scale(), "[" + F.name() + ", " + G.name() + "]"};
}

PrevectorField bracket_via_scaling(const PrevectorField& F, const PrevectorField& G, std::optional<double> tol) {
    const auto H = commutator(F, G, tol);
    const double lambda = F.lambda();
    auto map = [H, lambda](const Vec& a) -> Vec { return a + (H(a) - a) / lambda; };
    return {map, F.domain(), F.range(), F.scale(), "scaled [" + F.name() + ", " + G.name() + "]"};
}

Vec classical_bracket(const ClassicalField& X, const ClassicalField& Y, const Vec& a, double h) {
    if (!(h > 0.0)) {
        throw ConfigError("classical bracket step must be positive");
    }
    const Mat DX = central_jacobian(X.map, a, h);
    const Mat DY = central_jacobian(Y.map, a, h);
    return DY * X.at(a) - DX * Y.at(a);
}

namespace {

Vec rk4_flow(const ClassicalField& X, Vec x, double t, int substeps) {
    const double h = t / substeps;
    for (int i = 0; i < substeps; ++i) {
        const Vec k1 = X(x);
        const Vec k2 = X(x + 0.5 * h * k1);
        const Vec k3 = X(x + 0.5 * h * k2);
        const Vec k4 = X(x + h * k3);
        x += (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return x;
}

}  // namespace

Vec classical_bracket_flow_limit(const ClassicalField& X, const ClassicalField& Y, const Vec& a, double t,
                                 int substeps) {
    if (!(t > 0.0) || substeps < 1) {
        throw ConfigError("flow-limit bracket needs t > 0 and at least one substep");
    }
    Vec x = rk4_flow(X, a, t, substeps);
    x = rk4_flow(Y, x, t, substeps);
    x = rk4_flow(X, x, -t, substeps);
    x = rk4_flow(Y, x, -t, substeps);
    return (x - a) / (t * t);
}

bool BracketReport::all(Relation r) const {
    return std::all_of(verdicts.begin(), verdicts.end(), [r](const OrderVerdict& v) { return v.relation == r; });
}

BracketReport check_bracket_realizes_classical(const FieldFamily& F, const FieldFamily& G, const ClassicalField& X,
                                               const ClassicalField& Y, const std::vector<Vec>& points,
                                               const SweepPlan& plan, std::optional<double> h) {
    const auto scales = plan.scales();
    const double step = h.value_or(scales.back().lambda());
    BracketReport report;
    report.points = points;
    std::vector<Vec> classical;
    for (const auto& a : points) {
        classical.push_back(classical_bracket(X, Y, a, step));
    }

    // magnitudes[i][k]: point i, scale k.
    std::vector<std::vector<OrderSample>> samples(points.size());
    for (std::size_t k = 0; k < scales.size(); ++k) {
        const auto f = F(scales[k]);
        const auto g = G(scales[k]);
        const auto br = lie_bracket(f, g);
        const auto H = commutator(f, g);
        const double lambda = scales[k].lambda();
        for (std::size_t i = 0; i < points.size(); ++i) {
            const Vec d = br(points[i]) - points[i];
            samples[i].push_back({lambda, (d / lambda - classical[i]).norm()});
            if (k + 1 == scales.size()) {
                report.iterated.push_back(d);
                report.scaled.push_back((H(points[i]) - points[i]) / lambda);
            }
        }
    }
    for (const auto& s : samples) {
        report.verdicts.push_back(assess(s, 0.0, plan));
    }
    report.classical = std::move(classical);
    return report;
}

OrderVerdict check_bracket_prevector(const FieldFamily& F, const FieldFamily& G, const std::vector<Vec>& points,
                                     const SweepPlan& plan) {
    auto samples = sweep(plan, [&](const Scale& s) {
        const auto br = lie_bracket(F(s), G(s));
        double m = 0.0;
        for (const auto& a : points) {
            m = std::max(m, (br(a) - a).norm());
        }
        return m;
    });
    return assess(samples, 1.0, plan);
}

OrderVerdict check_bracket_equivalence(const FieldFamily& F, const FieldFamily& G, const FieldFamily& H,
                                       const std::vector<Vec>& points, const SweepPlan& plan) {
    auto samples = sweep(plan, [&](const Scale& s) {
        const auto f = F(s);
        const auto fg = lie_bracket(f, G(s));
        const auto fh = lie_bracket(f, H(s));
        double m = 0.0;
        for (const auto& a : points) {
            m = std::max(m, (fg(a) - fh(a)).norm());
        }
        return m;
    });
    return assess(samples, 1.0, plan);
}

CommutationReport check_commutation(const FieldFamily& F, const FieldFamily& G, const Box& region, const Rational& T,
                                    const SweepPlan& plan, const CommutationOptions& opt) {
    if (opt.grid < 1 || opt.num_points < 1) {
        throw ConfigError("commutation check needs a positive grid and point count");
    }
    const auto points = region.samples(static_cast<std::size_t>(opt.num_points), opt.seed);
    std::vector<Rational> grid;
    for (int i = 1; i <= opt.grid; ++i) {
        grid.push_back(T * Rational(i, opt.grid));
    }

    auto flow_samples = sweep(plan, [&](const Scale& s) {
        const auto f = F(s);
        const auto g = G(s);
        std::vector<std::int64_t> steps;
        for (const auto& t : grid) {
            steps.push_back(s.steps(t));
        }
        const std::int64_t n = steps.back();
        double m = 0.0;
        for (const auto& a : points) {
            const auto of = orbit(f, a, n);
            const auto og = orbit(g, a, n);
            for (std::size_t j = 0; j < steps.size(); ++j) {
                // F_t(G_s(a)) for every t, and G_s(F_t(a)) for every s.
                const auto f_after_g = orbit(f, og[static_cast<std::size_t>(steps[j])], n);
                for (std::size_t i = 0; i < steps.size(); ++i) {
                    const auto g_after_f_i = iterate(g, of[static_cast<std::size_t>(steps[i])], steps[j]);
                    m = std::max(m, (f_after_g[static_cast<std::size_t>(steps[i])] - g_after_f_i).norm());
                }
            }
        }
        return m;
    });
    auto bracket_samples = sweep(plan, [&](const Scale& s) {
        const auto br = lie_bracket(F(s), G(s));
        double m = 0.0;
        for (const auto& a : points) {
            m = std::max(m, (br(a) - a).norm());
        }
        return m;
    });

    CommutationReport report;
    report.flows = assess(flow_samples, 0.0, plan);
    report.bracket = assess(bracket_samples, 1.0, plan);
    report.agree = (report.flows.relation == Relation::prec_prec) == (report.bracket.relation == Relation::prec_prec);
    return report;
}

// =============================================================================
// Straightening
// =============================================================================

Vec euler_flow(const ClassicalField& X, const Vec& a, double t, double lambda) {
    const double sign = t < 0 ? -1.0 : 1.0;
    const double steps = std::abs(t) / lambda;
    const auto n = static_cast<std::int64_t>(std::floor(steps));
    const double frac = steps - static_cast<double>(n);
    Vec x = a;
    for (std::int64_t k = 0; k < n; ++k) {
        x += sign * lambda * X(x);
    }
    if (frac > 0.0) {
        x += sign * frac * lambda * X(x);
    }
    return x;
}

namespace {

struct Chart {
    std::vector<ClassicalField> fields;
    Vec p;
    std::vector<int> axes;
    double lambda;

    Vec operator()(const Vec& theta) const {
        const auto k = static_cast<Eigen::Index>(fields.size());
        Vec x = p;
        for (std::size_t j = 0; j < axes.size(); ++j) {
            x[axes[j]] += theta[k + static_cast<Eigen::Index>(j)];
        }
        for (auto i = k; i-- > 0;) {
            x = euler_flow(fields[static_cast<std::size_t>(i)], x, theta[i], lambda);
        }
        return x;
    }
};

// Subsets of size m of {0..n-1}, lexicographic.
void subsets(int n, int m, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == m) {
        out.push_back(cur);
        return;
    }
    for (int i = start; i < n; ++i) {
        cur.push_back(i);
        subsets(n, m, i + 1, cur, out);
        cur.pop_back();
    }
}

Vec newton_inverse(const Chart& psi, const Vec& b, const Vec& start) {
    Vec theta = start;
    for (int it = 0; it < 60; ++it) {
        const Vec r = psi(theta) - b;
        if (r.norm() <= 1e-11 * (1.0 + b.norm())) {
            return theta;
        }
        const Mat J = central_jacobian([&psi](const Vec& th) { return psi(th); }, theta, 1e-7);
        Eigen::FullPivLU<Mat> lu(J);
        if (!lu.isInvertible()) {
            throw InverseDiverged("singular chart Jacobian at " + format_point(theta));
        }
        theta -= lu.solve(r);
    }
    throw InverseDiverged("Newton inverse of the straightening chart did not converge at " + format_point(b));
}

}  // namespace

Straightening straighten(const std::vector<ClassicalField>& fields, const Vec& p, const Box& region,
                         const SweepPlan& plan, const StraightenOptions& opt) {
    const auto n = static_cast<int>(p.size());
    const auto k = static_cast<int>(fields.size());
    if (k < 1 || k > n) {
        throw ConfigError("straighten needs 1 <= k <= n fields");
    }
    Mat V(n, k);
    for (int i = 0; i < k; ++i) {
        if (fields[static_cast<std::size_t>(i)].dimension() != n) {
            throw ConfigError("straighten: field dimension does not match the point");
        }
        V.col(i) = fields[static_cast<std::size_t>(i)].at(p);
    }
    const double gram = (V.transpose() * V).determinant();
    if (gram < opt.gram_min) {
        throw NotIndependent("Gram determinant " + format_double(gram) + " of the fields at " + format_point(p) +
                             " is below " + format_double(opt.gram_min));
    }
    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            for (const auto& a : region.samples(static_cast<std::size_t>(opt.bracket_samples), 1)) {
                const Vec br = classical_bracket(fields[static_cast<std::size_t>(i)],
                                                 fields[static_cast<std::size_t>(j)], a, opt.bracket_step);
                if (br.cwiseAbs().maxCoeff() > opt.bracket_max) {
                    throw NotCommuting("fields " + std::to_string(i) + " and " + std::to_string(j) +
                                       " have bracket " + format_point(br) + " at " + format_point(a));
                }
            }
        }
    }

    // Complementary plane: the coordinate axes that make [V | e_c] best conditioned.
    std::vector<std::vector<int>> candidates;
    std::vector<int> cur;
    subsets(n, n - k, 0, cur, candidates);
    std::vector<int> axes;
    double best = -1.0;
    Mat frame(n, n);
    for (const auto& c : candidates) {
        Mat M(n, n);
        M.leftCols(k) = V;
        for (std::size_t j = 0; j < c.size(); ++j) {
            M.col(k + static_cast<Eigen::Index>(j)) = Vec::Unit(n, c[j]);
        }
        const double d = std::abs(M.determinant());
        if (d > best) {
            best = d;
            axes = c;
            frame = M;
        }
    }

    Straightening out{Transition::identity(Box::centered(n, opt.radius), plan.finest()), {}, gram, axes};
    const Box params = Box::centered(n, opt.radius);
    const auto grid = params.grid(opt.grid_per_axis);
    for (int i = 0; i < k; ++i) {
        auto samples = sweep(plan, [&](const Scale& s) {
            const Chart psi{fields, p, axes, s.lambda()};
            const double h = s.lambda() / 16;
            double m = 0.0;
            for (const auto& theta : grid) {
                Vec up = theta;
                Vec down = theta;
                up[i] += h;
                down[i] -= h;
                const Vec d = (psi(up) - psi(down)) / (2 * h);
                m = std::max(m, (d - fields[static_cast<std::size_t>(i)](psi(theta))).norm());
            }
            return m;
        });
        out.verdicts.push_back(assess(samples, 0.0, plan));
    }

    const Chart psi{fields, p, axes, plan.finest().lambda()};
    const Mat frame_inv = frame.inverse();
    auto forward = [psi](const Vec& theta) { return psi(theta); };
    auto inverse = [psi, frame_inv, p](const Vec& b) { return newton_inverse(psi, b, frame_inv * (b - p)); };
    out.chart = Transition(forward, inverse, params, std::nullopt, plan.finest());
    return out;
}

}  // namespace prevec
