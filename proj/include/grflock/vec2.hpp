#pragma once

#include <cmath>
#include <ostream>

namespace grflock {

/**
 * @brief 2D vector used for positions [m], velocities [m/s] and
 *        accelerations [m/s^2].
 *
 * Plain value type; all operations are allocation-free.
 */
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }

    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

    constexpr bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
    constexpr bool operator!=(const Vec2& o) const { return !(*this == o); }

    constexpr double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    constexpr double norm_sq() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm_sq()); }

    double distance_to(const Vec2& o) const { return (*this - o).norm(); }

    bool finite() const { return std::isfinite(x) && std::isfinite(y); }

    /// Scale back to `max_norm` if longer; direction is preserved.
    Vec2 clamped_norm(double max_norm) const {
        const double n = norm();
        if (n > max_norm && n > 0.0) {
            return *this * (max_norm / n);
        }
        return *this;
    }
};

inline constexpr Vec2 operator*(double s, const Vec2& v) { return v * s; }

inline std::ostream& operator<<(std::ostream& os, const Vec2& v) {
    return os << "(" << v.x << ", " << v.y << ")";
}

/**
 * @brief Unsigned angle in [0, pi] between two vectors.
 *
 * The cosine is clamped into [-1, 1] before acos so rounding can never
 * produce NaN. If either vector is shorter than `eps`, the angle is
 * defined as 0.
 */
inline double angle_between(const Vec2& a, const Vec2& b, double eps) {
    const double na = a.norm();
    const double nb = b.norm();
    if (na < eps || nb < eps) {
        return 0.0;
    }
    double c = a.dot(b) / (na * nb);
    c = std::max(-1.0, std::min(1.0, c));
    return std::acos(c);
}

}  // namespace grflock
