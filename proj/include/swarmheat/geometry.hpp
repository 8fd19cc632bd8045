#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swarmheat {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
    friend constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
    friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double norm2(Vec2 a) { return dot(a, a); }
inline double norm(Vec2 a) { return std::sqrt(norm2(a)); }
inline bool is_finite(Vec2 a) { return std::isfinite(a.x) && std::isfinite(a.y); }

/// Axis-aligned rectangle [lower.x, lower.x + length_x] x [lower.y, lower.y + length_y].
struct Domain {
    Vec2 lower{0.0, 0.0};
    double length_x = 1.0;
    double length_y = 1.0;

    static Domain unit_square() { return {}; }
    static Domain square(double side) { return {{0.0, 0.0}, side, side}; }

    void validate() const {
        if (!(length_x > 0.0) || !(length_y > 0.0) || !std::isfinite(length_x) ||
            !std::isfinite(length_y) || !is_finite(lower))
            throw std::invalid_argument("domain side lengths must be positive and finite");
    }

    Vec2 upper() const { return {lower.x + length_x, lower.y + length_y}; }
    Vec2 center() const { return {lower.x + 0.5 * length_x, lower.y + 0.5 * length_y}; }
    double area() const { return length_x * length_y; }
    /// Density of the uniform distribution on this domain.
    double uniform_level() const { return 1.0 / area(); }

    bool contains(Vec2 p) const {
        return p.x >= lower.x && p.x <= lower.x + length_x && p.y >= lower.y &&
               p.y <= lower.y + length_y;
    }
    Vec2 clamp(Vec2 p) const {
        return {std::clamp(p.x, lower.x, lower.x + length_x),
                std::clamp(p.y, lower.y, lower.y + length_y)};
    }
};

}  // namespace swarmheat
