#include "prevec/geometry.hpp"

#include "prevec/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

namespace prevec {

Vec vec(std::initializer_list<double> values) {
    Vec v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) {
        v[i++] = x;
    }
    return v;
}

Vec vec(const std::vector<double>& values) {
    Vec v(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = values[i];
    }
    return v;
}

std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

std::string format_double(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc{}) {
        return "nan";
    }
    return {buf, end};
}

std::string format_point(const Vec& v) {
    std::string out = "(";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        out += format_double(v[i]);
    }
    return out + ")";
}

// =============================================================================
// Box
// =============================================================================

Box::Box(Vec lo, Vec hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_.size() != hi_.size() || lo_.size() == 0) {
        throw ConfigError("box corners must have the same positive dimension");
    }
    for (Eigen::Index i = 0; i < lo_.size(); ++i) {
        if (!(lo_[i] < hi_[i]) || !std::isfinite(lo_[i]) || !std::isfinite(hi_[i])) {
            throw ConfigError("box must satisfy lo < hi with finite bounds, got " + format_point(lo_) +
                              " .. " + format_point(hi_));
        }
    }
}

Box Box::centered(int dimension, double radius) {
    return {Vec::Constant(dimension, -radius), Vec::Constant(dimension, radius)};
}

Box Box::around(const Vec& center, double radius) {
    return {center.array() - radius, center.array() + radius};
}

bool Box::contains(const Vec& p) const {
    if (p.size() != lo_.size()) {
        return false;
    }
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (!(p[i] >= lo_[i] && p[i] <= hi_[i])) {
            return false;
        }
    }
    return true;
}

bool Box::contains(const Box& other) const { return contains(other.lo_) && contains(other.hi_); }

Box Box::expanded(double margin) const { return {lo_.array() - margin, hi_.array() + margin}; }

Box Box::bounding(const std::vector<Vec>& points, double margin) {
    if (points.empty()) {
        throw ConfigError("bounding box of an empty point set");
    }
    Vec lo = points.front();
    Vec hi = points.front();
    for (const auto& p : points) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    return {lo.array() - margin, hi.array() + margin};
}

Vec Box::sample(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vec p(lo_.size());
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        p[i] = lo_[i] + unit(rng) * (hi_[i] - lo_[i]);
    }
    return p;
}

std::vector<Vec> Box::samples(std::size_t count, std::uint64_t seed) const {
    std::vector<Vec> out;
    const int n = dimension();
    const Vec center = 0.5 * (lo_ + hi_);
    const Vec half = 0.5 * (hi_ - lo_);
    if (n <= 4) {
        for (int mask = 0; mask < (1 << n) && out.size() < count; ++mask) {
            Vec c(n);
            for (int i = 0; i < n; ++i) {
                c[i] = center[i] + ((mask >> i) & 1 ? 0.99 : -0.99) * half[i];
            }
            out.push_back(c);
        }
    }
    if (out.size() < count) {
        out.push_back(center);
    }
    std::mt19937_64 rng(seed);
    while (out.size() < count) {
        out.push_back(sample(rng));
    }
    return out;
}

std::vector<Vec> Box::grid(int per_axis, double inset) const {
    const int n = dimension();
    std::vector<Vec> out;
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    while (true) {
        Vec p(n);
        for (int i = 0; i < n; ++i) {
            const double lo = lo_[i] + inset;
            const double hi = hi_[i] - inset;
            p[i] = per_axis == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * idx[static_cast<std::size_t>(i)] / (per_axis - 1);
        }
        out.push_back(p);
        int axis = 0;
        while (axis < n && ++idx[static_cast<std::size_t>(axis)] == per_axis) {
            idx[static_cast<std::size_t>(axis)] = 0;
            ++axis;
        }
        if (axis == n) {
            break;
        }
    }
    return out;
}

std::string Box::to_string() const { return "[" + format_point(lo_) + " .. " + format_point(hi_) + "]"; }

Vec sample_unit_ball(int dimension, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vec dir(dimension);
    do {
        for (int i = 0; i < dimension; ++i) {
            dir[i] = normal(rng);
        }
    } while (dir.norm() == 0.0);
    const double radius = std::pow(unit(rng), 1.0 / dimension);
    return dir.normalized() * radius;
}

// =============================================================================
// Rational
// =============================================================================

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) {
        throw ConfigError("rational with zero denominator");
    }
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    num_ = g == 0 ? 0 : num / g;
    den_ = g == 0 ? 1 : den / g;
}

namespace {

std::int64_t checked(__int128 v) {
    if (v > INT64_MAX || v < INT64_MIN) {
        throw ConfigError("rational arithmetic overflow");
    }
    return static_cast<std::int64_t>(v);
}

Rational make(__int128 num, __int128 den) {
    if (den < 0) {
        num = -num;
        den = -den;
    }
    __int128 a = num < 0 ? -num : num;
    __int128 b = den;
    while (b != 0) {
        const __int128 t = a % b;
        a = b;
        b = t;
    }
    if (a > 1) {
        num /= a;
        den /= a;
    }
    return {checked(num), checked(den)};
}

}  // namespace

Rational Rational::parse(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash != std::string::npos) {
            std::size_t used_num = 0;
            std::size_t used_den = 0;
            const auto num = std::stoll(text.substr(0, slash), &used_num);
            const auto den = std::stoll(text.substr(slash + 1), &used_den);
            if (used_num != slash || used_den != text.size() - slash - 1) {
                throw ConfigError("bad rational '" + text + "'");
            }
            return {num, den};
        }
        // Finite decimal, optionally with exponent: digits are read exactly.
        std::string mantissa = text;
        int exponent = 0;
        const auto e = text.find_first_of("eE");
        if (e != std::string::npos) {
            mantissa = text.substr(0, e);
            std::size_t used = 0;
            exponent = std::stoi(text.substr(e + 1), &used);
            if (used != text.size() - e - 1) {
                throw ConfigError("bad rational '" + text + "'");
            }
        }
        bool negative = false;
        std::size_t pos = 0;
        if (pos < mantissa.size() && (mantissa[pos] == '-' || mantissa[pos] == '+')) {
            negative = mantissa[pos] == '-';
            ++pos;
        }
        __int128 num = 0;
        bool seen_digit = false;
        bool seen_dot = false;
        for (; pos < mantissa.size(); ++pos) {
            const char c = mantissa[pos];
            if (c == '.' && !seen_dot) {
                seen_dot = true;
                continue;
            }
            if (c < '0' || c > '9') {
                throw ConfigError("bad rational '" + text + "'");
            }
            seen_digit = true;
            num = num * 10 + (c - '0');
            if (seen_dot) {
                --exponent;
            }
            if (num > INT64_MAX) {
                throw ConfigError("rational '" + text + "' has too many digits");
            }
        }
        if (!seen_digit) {
            throw ConfigError("bad rational '" + text + "'");
        }
        __int128 den = 1;
        for (; exponent > 0; --exponent) {
            num *= 10;
        }
        for (; exponent < 0; ++exponent) {
            den *= 10;
        }
        return make(negative ? -num : num, den);
    } catch (const std::logic_error&) {
        throw ConfigError("bad rational '" + text + "'");
    }
}

std::int64_t Rational::floor_times(std::int64_t n) const {
    const __int128 p = static_cast<__int128>(num_) * n;
    __int128 q = p / den_;
    if (p % den_ != 0 && p < 0) {
        --q;
    }
    return checked(q);
}

std::string Rational::to_string() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(const Rational& a, const Rational& b) {
    return make(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                static_cast<__int128>(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
    return make(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) {
        throw ConfigError("rational division by zero");
    }
    return make(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
}

bool operator<(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
}

}  // namespace prevec
