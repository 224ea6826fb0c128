#pragma once

#include <cmath>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace lqem {

/// Plain 3-vector. All field quantities are nondimensionalized doubles.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3() = default;
    constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    constexpr Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    constexpr Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    constexpr Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

    bool finite() const {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
    }
};

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr Vec3 operator-(const Vec3& a) { return Vec3{-a.x, -a.y, -a.z}; }

constexpr double dot(const Vec3& a, const Vec3& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

constexpr double norm2(const Vec3& a) { return dot(a, a); }

inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return Vec3{a.y * b.z - a.z * b.y,
                a.z * b.x - a.x * b.z,
                a.x * b.y - a.y * b.x};
}

std::string to_string(const Vec3& v);
std::ostream& operator<<(std::ostream& os, const Vec3& v);

/// Throws std::invalid_argument naming `what` if v has a NaN/Inf component.
void ensure_finite(const Vec3& v, const char* what);
void ensure_finite(double v, const char* what);

} // namespace lqem
