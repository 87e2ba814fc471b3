#ifndef ARW_CORE_HPP
#define ARW_CORE_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace arw {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Resource limits exceeded (enumeration ceilings, triple-loop ceilings).
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numerical failure (quadrature non-convergence, inconsistent tallies).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Integer 3-vectors (lattice points) and small float linear algebra.
// ---------------------------------------------------------------------------

struct Vec3i {
    std::int64_t x = 0, y = 0, z = 0;

    friend bool operator==(const Vec3i&, const Vec3i&) = default;
    // lexicographic order, the documented total order for lattice output
    friend auto operator<=>(const Vec3i&, const Vec3i&) = default;

    Vec3i operator-() const { return {-x, -y, -z}; }
    Vec3i operator-(const Vec3i& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3i operator+(const Vec3i& o) const { return {x + o.x, y + o.y, z + o.z}; }

    std::int64_t dot(const Vec3i& o) const { return x * o.x + y * o.y + z * o.z; }
    std::int64_t norm2() const { return dot(*this); }
    Vec3i cross(const Vec3i& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
};

struct Vec3 {
    double x = 0, y = 0, z = 0;

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.dot(b); }
inline Vec3 to_vec3(const Vec3i& v) {
    return {static_cast<double>(v.x), static_cast<double>(v.y), static_cast<double>(v.z)};
}

/// Dense symmetric-friendly 3x3 matrix.
struct Mat3 {
    std::array<std::array<double, 3>, 3> a{};

    static Mat3 identity() {
        Mat3 m;
        m.a[0][0] = m.a[1][1] = m.a[2][2] = 1.0;
        return m;
    }
    double& operator()(int i, int j) { return a[i][j]; }
    double operator()(int i, int j) const { return a[i][j]; }

    Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0;
                for (int k = 0; k < 3; ++k) s += a[i][k] * o.a[k][j];
                r.a[i][j] = s;
            }
        return r;
    }
    Vec3 operator*(const Vec3& v) const {
        return {a[0][0] * v.x + a[0][1] * v.y + a[0][2] * v.z,
                a[1][0] * v.x + a[1][1] * v.y + a[1][2] * v.z,
                a[2][0] * v.x + a[2][1] * v.y + a[2][2] * v.z};
    }
    Mat3 operator-(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.a[i][j] = a[i][j] - o.a[i][j];
        return r;
    }
    double trace() const { return a[0][0] + a[1][1] + a[2][2]; }
    double max_abs() const {
        double m = 0;
        for (const auto& row : a)
            for (double v : row) m = std::max(m, std::abs(v));
        return m;
    }
};

// ---------------------------------------------------------------------------
// Integer helpers.
// ---------------------------------------------------------------------------

/// Floor of sqrt(n) for n >= 0, exact.
inline std::int64_t isqrt(std::int64_t n) {
    if (n < 0) throw std::invalid_argument("isqrt: negative argument");
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

inline bool is_perfect_square(std::int64_t n, std::int64_t& root) {
    if (n < 0) return false;
    root = isqrt(n);
    return root * root == n;
}

inline std::int64_t gcd64(std::int64_t a, std::int64_t b) {
    a = std::abs(a);
    b = std::abs(b);
    while (b) {
        a %= b;
        std::swap(a, b);
    }
    return a;
}

// ---------------------------------------------------------------------------
// Deterministic reductions. All pairwise sums in the project go through
// this so results do not depend on worker count.
// ---------------------------------------------------------------------------

inline double pairwise_sum(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double v : xs) s += v;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

inline double pairwise_sum(const std::vector<double>& xs) {
    return pairwise_sum(std::span<const double>(xs));
}

}  // namespace arw

#endif  // ARW_CORE_HPP
