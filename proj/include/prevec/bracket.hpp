#pragma once

// Lie bracket of prevector fields: the commutator G^-1 F^-1 G F iterated
// 1/lambda times, and what it has to do with the classical bracket.

#include "prevec/charts.hpp"
#include "prevec/fields.hpp"
#include "prevec/flow.hpp"
#include "prevec/order.hpp"

#include <optional>
#include <vector>

namespace prevec {

/// G^-1 o F^-1 o G o F. Inverses are taken with tolerance `tol` (default
/// lambda^3, so 1/lambda iterations stay well below lambda^2 in total).
PrevectorField commutator(const PrevectorField& F, const PrevectorField& G, std::optional<double> tol = std::nullopt);

/// The commutator iterated exactly N = 1/lambda times. Evaluation throws
/// DomainExit with the index of the commutator iterate that left the domain.
PrevectorField lie_bracket(const PrevectorField& F, const PrevectorField& G, std::optional<double> tol = std::nullopt);

/// a + (H(a) - a) / lambda with H the commutator.
PrevectorField bracket_via_scaling(const PrevectorField& F, const PrevectorField& G,
                                   std::optional<double> tol = std::nullopt);

/// (DY) X - (DX) Y at a, Jacobians by central differences with step h.
Vec classical_bracket(const ClassicalField& X, const ClassicalField& Y, const Vec& a, double h);

/// (1/t^2)(psi_-t phi_-t psi_t phi_t (a) - a) with phi, psi the flows of X, Y
/// integrated by classical RK4 with `substeps` steps. An independent route to
/// the same vector, accurate to O(t).
Vec classical_bracket_flow_limit(const ClassicalField& X, const ClassicalField& Y, const Vec& a, double t,
                                 int substeps = 64);

struct BracketReport {
    std::vector<Vec> points;
    /// [F,G](a) - a at the finest scale.
    std::vector<Vec> iterated;
    /// (H(a) - a) / lambda at the finest scale.
    std::vector<Vec> scaled;
    std::optional<std::vector<Vec>> classical;
    std::vector<OrderVerdict> verdicts;

    [[nodiscard]] bool all(Relation r) const;
};

/// Per point, |(1/lambda)([F,G](a) - a) - [X,Y](a)| judged prec_prec against
/// p = 0. The classical bracket uses step h (default: finest lambda of the plan).
BracketReport check_bracket_realizes_classical(const FieldFamily& F, const FieldFamily& G, const ClassicalField& X,
                                               const ClassicalField& Y, const std::vector<Vec>& points,
                                               const SweepPlan& plan, std::optional<double> h = std::nullopt);

/// max over points of |[F,G](a) - a| judged against p = 1; prec means the
/// bracket is a prevector field there.
OrderVerdict check_bracket_prevector(const FieldFamily& F, const FieldFamily& G, const std::vector<Vec>& points,
                                     const SweepPlan& plan);

/// max over points of |[F,G](a) - [F,H](a)| judged against p = 1; prec_prec
/// means the two brackets are equivalent.
OrderVerdict check_bracket_equivalence(const FieldFamily& F, const FieldFamily& G, const FieldFamily& H,
                                       const std::vector<Vec>& points, const SweepPlan& plan);

struct CommutationOptions {
    int grid = 8;
    int num_points = 5;
    std::uint64_t seed = 1;
};

struct CommutationReport {
    /// max |F_t(G_s(a)) - G_s(F_t(a))| over the (t, s) grid, against p = 0.
    OrderVerdict flows;
    /// max |[F,G](a) - a|, against p = 1.
    OrderVerdict bracket;
    /// Both commute (prec_prec) or neither does.
    bool agree = false;

    [[nodiscard]] bool commuting() const {
        return flows.relation == Relation::prec_prec && bracket.relation == Relation::prec_prec;
    }
};

/// Grid t_i = i T / grid, s_j = j T / grid for i, j = 1..grid.
CommutationReport check_commutation(const FieldFamily& F, const FieldFamily& G, const Box& region, const Rational& T,
                                    const SweepPlan& plan, const CommutationOptions& opt = {});

// =============================================================================
// Straightening
// =============================================================================

struct StraightenOptions {
    /// Parameters range over [-radius, radius] in every coordinate.
    double radius = 0.25;
    int grid_per_axis = 3;
    double gram_min = 1e-8;
    double bracket_max = 1e-6;
    double bracket_step = 1e-4;
    int bracket_samples = 16;
};

struct Straightening {
    /// Psi at the finest scale, parameters (t_1..t_k, s_1..s_{n-k}).
    Transition chart;
    /// |dPsi/dt_i - X_i(Psi)| per field, against p = 0.
    std::vector<OrderVerdict> verdicts;
    double gram_determinant = 0.0;
    /// Coordinate axes spanning the plane q(s) = p + sum s_j e_{axes[j]}.
    std::vector<int> complementary_axes;
};

/// Psi(t, s) = h^1_{t_1} o ... o h^k_{t_k}(q(s)), flows by Euler steps with a
/// final fractional step. Throws NotIndependent, NotCommuting, InverseDiverged.
Straightening straighten(const std::vector<ClassicalField>& fields, const Vec& p, const Box& region,
                         const SweepPlan& plan, const StraightenOptions& opt = {});

/// Euler flow of X for time t (either sign) at step lambda, the last step
/// shortened so that the result is continuous in t.
Vec euler_flow(const ClassicalField& X, const Vec& a, double t, double lambda);

}  // namespace prevec
