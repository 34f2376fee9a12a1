#pragma once

// Points, boxes and exact rational times. Everything lives in chart
// coordinates; there is no global manifold structure.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace prevec {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Map handles. They must be pure: same input, same output.
using VectorMap = std::function<Vec(const Vec&)>;
using ScalarMap = std::function<double(const Vec&)>;

/// Build a vector from a brace list, e.g. vec({1.0, 0.0}).
Vec vec(std::initializer_list<double> values);
Vec vec(const std::vector<double>& values);
std::vector<double> to_std(const Vec& v);

/// Human readable "(a, b, ...)" with shortest round-trip formatting.
std::string format_point(const Vec& v);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double x);

// =============================================================================
// Box
// =============================================================================

/// Axis-aligned box with lo < hi in every coordinate. Stands in for the
/// coordinate neighbourhoods and balls of the theory.
class Box {
public:
    Box(Vec lo, Vec hi);

    /// [-r, r]^n
    static Box centered(int dimension, double radius);
    /// Box of half-width `radius` around `center`.
    static Box around(const Vec& center, double radius);

    [[nodiscard]] int dimension() const { return static_cast<int>(lo_.size()); }
    [[nodiscard]] const Vec& lo() const { return lo_; }
    [[nodiscard]] const Vec& hi() const { return hi_; }

    [[nodiscard]] bool contains(const Vec& p) const;
    [[nodiscard]] bool contains(const Box& other) const;

    /// Grow (or shrink, for negative margin) every side by `margin`.
    [[nodiscard]] Box expanded(double margin) const;

    /// Smallest box containing all points, padded by `margin` on every side.
    static Box bounding(const std::vector<Vec>& points, double margin);

    /// Uniform point in the box.
    [[nodiscard]] Vec sample(std::mt19937_64& rng) const;

    /// Deterministic sample set: the 2^n corners shrunk by 1% towards the
    /// centre, the centre itself, then uniform points up to `count`.
    [[nodiscard]] std::vector<Vec> samples(std::size_t count, std::uint64_t seed) const;

    /// Regular grid with `per_axis` points per coordinate, inset by `inset`.
    [[nodiscard]] std::vector<Vec> grid(int per_axis, double inset = 0.0) const;

    [[nodiscard]] std::string to_string() const;

private:
    Vec lo_;
    Vec hi_;
};

/// Uniform sample of the closed unit ball in R^n.
Vec sample_unit_ball(int dimension, std::mt19937_64& rng);

// =============================================================================
// Rational
// =============================================================================

/// Exact rational number p/q with q > 0, reduced. Used for flow times so that
/// floor(t / lambda) = floor(t * N) is computed without rounding.
class Rational {
public:
    Rational() = default;
    Rational(std::int64_t num, std::int64_t den = 1);  // NOLINT(google-explicit-constructor)

    /// Accepts "p/q", integers and finite decimals ("0.125", "-2.5e-1").
    static Rational parse(const std::string& text);

    [[nodiscard]] std::int64_t num() const { return num_; }
    [[nodiscard]] std::int64_t den() const { return den_; }
    [[nodiscard]] double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    [[nodiscard]] bool is_negative() const { return num_ < 0; }
    [[nodiscard]] Rational abs() const { return {num_ < 0 ? -num_ : num_, den_}; }

    /// floor(this * n), exact.
    [[nodiscard]] std::int64_t floor_times(std::int64_t n) const;

    [[nodiscard]] std::string to_string() const;

    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a) { return {-a.num_, a.den_}; }
    friend bool operator==(const Rational& a, const Rational& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
    friend bool operator<(const Rational& a, const Rational& b);
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

}  // namespace prevec
