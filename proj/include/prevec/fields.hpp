#pragma once

// Prevector fields: near-identity maps F with F(a) - a of order lambda, on a
// box domain. A field "under sweep" is a family of maps, one per scale; see
// FieldFamily.

#include "prevec/geometry.hpp"
#include "prevec/order.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace prevec {

enum class Smoothness { lipschitz, c1, c2, ck };

const char* to_string(Smoothness s);

/// Classical vector field X on a box. The smoothness tag is metadata asserted
/// by whoever built the field; nothing checks it directly.
struct ClassicalField {
    VectorMap map;
    Box domain;
    Smoothness smoothness = Smoothness::c2;
    std::string name;

    /// Unchecked evaluation.
    Vec operator()(const Vec& a) const { return map(a); }
    /// Throws DomainExit if `a` is outside the domain.
    [[nodiscard]] Vec at(const Vec& a) const;
    [[nodiscard]] int dimension() const { return domain.dimension(); }
};

/// Maxima over a sampled set. Units: C_hat in lambda, K_hat and K2_hat as in
/// |Delta(F - I)| <= K lambda |v| (resp. K2 lambda |v| |w|).
struct RegularityEstimate {
    double C_hat = 0.0;
    double K_hat = 0.0;
    std::optional<double> K2_hat;
    Box region = Box::centered(1, 1.0);
    int num_samples = 0;
    std::uint64_t seed = 0;
};

class PrevectorField {
public:
    PrevectorField(VectorMap map, Box domain, Box range, Scale scale, std::string name = {});

    /// F(a). Throws DomainExit if `a` is outside the domain.
    Vec operator()(const Vec& a) const;
    /// F(a) - a.
    [[nodiscard]] Vec displacement(const Vec& a) const { return (*this)(a) - a; }

    [[nodiscard]] const Box& domain() const { return domain_; }
    [[nodiscard]] const Box& range() const { return range_; }
    [[nodiscard]] const Scale& scale() const { return scale_; }
    [[nodiscard]] double lambda() const { return scale_.lambda(); }
    [[nodiscard]] int dimension() const { return domain_.dimension(); }
    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] const VectorMap& map() const { return map_; }

    [[nodiscard]] const std::optional<RegularityEstimate>& cached() const { return cached_; }
    void set_cached(RegularityEstimate e) { cached_ = std::move(e); }

    [[nodiscard]] PrevectorField with_domain(Box domain) const;

private:
    VectorMap map_;
    Box domain_;
    Box range_;
    Scale scale_;
    std::string name_;
    std::optional<RegularityEstimate> cached_;
};

/// One map per scale. Sweeps re-instantiate the family at every scale.
using FieldFamily = std::function<PrevectorField(const Scale&)>;

// =============================================================================
// Construction
// =============================================================================

/// F(a) = a + lambda X(a). The range defaults to X's domain. Throws
/// RangeOverflow if a sampled image leaves the range, DomainExit if `domain`
/// is not inside X's domain.
PrevectorField realize_classical(const ClassicalField& X, const Scale& s, const Box& domain,
                                 std::optional<Box> range = std::nullopt);

FieldFamily realize_family(ClassicalField X, Box domain, std::optional<Box> range = std::nullopt);

PrevectorField identity_field(const Box& domain, const Scale& s);

/// (F o G)(a) = F(G(a)) on G's domain.
PrevectorField compose(const PrevectorField& F, const PrevectorField& G);

/// Fixed-point inverse: y <- a - (F(y) - y) from y = a until |F(y) - a| <= tol.
/// The default tolerance is lambda * 1e-10; tolerances below what double
/// arithmetic can resolve at |a| are raised to 4 eps (1 + |a|).
/// Evaluation throws InverseDiverged after 100 steps.
PrevectorField invert(const PrevectorField& F, std::optional<double> tol = std::nullopt);

/// Smallest tolerance the inverse iteration can honour at `a`.
double resolvable_tolerance(const Vec& a);

/// sum over e in {0,1}^k of (-1)^{|e|} F(a + sum e_i v_i). Returns exact zero
/// when any v_i is zero.
Vec finite_difference(const VectorMap& F, const Vec& a, const std::vector<Vec>& vs);
/// Same, with F's domain check on every corner.
Vec finite_difference(const PrevectorField& F, const Vec& a, const std::vector<Vec>& vs);
/// Delta^k applied to F - I.
Vec displacement_difference(const PrevectorField& F, const Vec& a, const std::vector<Vec>& vs);

// =============================================================================
// Estimation
// =============================================================================

/// Pairs (a, b) used for K_hat: a from region.samples(num_samples, seed), and
/// for each a the points a + lambda u (u uniform in the unit ball) and
/// a +- lambda e_i, kept when b lies in `domain`.
std::vector<std::pair<Vec, Vec>> sample_pairs(const Box& region, const Box& domain, double lambda, int num_samples,
                                              std::uint64_t seed);

RegularityEstimate estimate_constants(const PrevectorField& F, const Box& region, int num_samples, std::uint64_t seed,
                                      bool want_d2, const std::vector<Vec>& extra_points = {});

// =============================================================================
// Sweeps
// =============================================================================

struct SweepOptions {
    int num_samples = 64;
    std::uint64_t seed = 1;
};

/// max |F(a) - a| over samples, judged prec against p = 1.
OrderVerdict check_prevector(const FieldFamily& F, const Box& region, const SweepPlan& plan,
                             const SweepOptions& opt = {});

/// max |F(a) - G(a)| over samples, judged against p = 1. prec_prec means F == G.
OrderVerdict check_equivalence(const FieldFamily& F, const FieldFamily& G, const Box& region, const SweepPlan& plan,
                               const SweepOptions& opt = {});

/// Directional derivative X h (a) by a five-point stencil along X(a).
double apply_field(const ClassicalField& X, const ScalarMap& h, const Vec& a, double step = 1e-3);

/// For every point and probe, |Xh(a) - (h(F(a)) - h(a)) / lambda|; the maximum
/// per scale is judged prec_prec against p = 0.
OrderVerdict check_realization(const FieldFamily& F, const ClassicalField& X, const std::vector<ScalarMap>& probes,
                               const std::vector<Vec>& points, const SweepPlan& plan);

/// D1 sweep: K_hat * lambda judged prec against p = 1.
OrderVerdict check_d1(const FieldFamily& F, const Box& region, const SweepPlan& plan, const SweepOptions& opt = {});
/// D2 sweep: K2_hat * lambda judged prec against p = 1.
OrderVerdict check_d2(const FieldFamily& F, const Box& region, const SweepPlan& plan, const SweepOptions& opt = {});

}  // namespace prevec
